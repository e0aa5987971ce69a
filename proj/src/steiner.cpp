#include "geotomo/steiner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geotomo/errors.hpp"
#include "geotomo/parallel.hpp"

namespace geotomo {

double outer_radius(const StarBody& K) { return 1.1 * K.max_rho(); }

std::optional<IntervalUnion> extract_fiber(const StarBody& K, const Vec& y, const Vec& u, double R_out, int s_res,
                                           double bisect_tol) {
    if (s_res < 3) throw DomainError("extract_fiber: s_res must be >= 3");
    const double step = 2.0 * R_out / (s_res - 1);
    auto inside = [&](double s) { return K.gauge(y + s * u) <= 1.0; };
    auto refine = [&](double lo, double hi, bool lo_inside) {
        // boundary between lo and hi, lo has membership lo_inside
        while (hi - lo > bisect_tol * R_out) {
            double mid = 0.5 * (lo + hi);
            if (inside(mid) == lo_inside) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    bool prev = inside(-R_out);
    if (prev) {
        std::ostringstream os;
        os << "extract_fiber: line endpoint inside the body at y = (" << y.transpose() << "); R_out too small";
        throw GeometryError(os.str());
    }
    std::vector<double> cross;
    double sprev = -R_out;
    for (int j = 1; j < s_res; ++j) {
        double s = -R_out + j * step;
        bool cur = inside(s);
        if (cur != prev) cross.push_back(refine(sprev, s, prev));
        prev = cur;
        sprev = s;
    }
    if (prev) {
        std::ostringstream os;
        os << "extract_fiber: line endpoint inside the body at y = (" << y.transpose() << "); R_out too small";
        throw GeometryError(os.str());
    }
    if (cross.size() % 2) {
        std::ostringstream os;
        os << "extract_fiber: odd crossing count at y = (" << y.transpose() << ")";
        throw GeometryError(os.str());
    }
    if (cross.empty()) return std::nullopt;
    std::vector<IntervalUnion::Interval> iv;
    for (std::size_t i = 0; i < cross.size(); i += 2) iv.emplace_back(cross[i], cross[i + 1]);
    IntervalUnion J = IntervalUnion::merged(std::move(iv), 3.0 * step);
    if (J.empty()) return std::nullopt;
    return J;
}

long FiberField::index_of(const Vec& yc) const {
    const int m = dim() - 1;
    long idx = 0;
    for (int k = 0; k < m; ++k) {
        long c = static_cast<long>(std::floor(yc[k] / h + 0.5 * cells));
        if (c < 0 || c >= cells) return -1;
        idx = idx * cells + c;
    }
    return idx;
}

Vec FiberField::cell_center(long idx) const {
    const int m = dim() - 1;
    Vec yc(m);
    for (int k = m - 1; k >= 0; --k) {
        long c = idx % cells;
        idx /= cells;
        yc[k] = (c + 0.5 - 0.5 * cells) * h;
    }
    return yc;
}

const std::optional<IntervalUnion>* FiberField::fiber_near(const Vec& x) const {
    Vec yc = basis.transpose() * x;
    long i = index_of(yc);
    if (i < 0) return nullptr;
    return &fibers[i];
}

std::size_t FiberField::present() const {
    std::size_t c = 0;
    for (const auto& f : fibers) c += f.has_value();
    return c;
}

FiberField extract_fibers(const StarBody& K, const Vec& u_in, double h, int s_res, double bisect_tol) {
    if (!(h > 0)) throw DomainError("extract_fibers: h must be positive");
    if (std::abs(u_in.norm() - 1.0) > 1e-10) throw DomainError("extract_fibers: u must be a unit vector");
    const int n = K.dim();
    FiberField F;
    F.u = u_in;
    F.basis = complement_basis(u_in);
    F.h = h;
    F.R_out = outer_radius(K);
    F.cells = 2 * static_cast<int>(std::ceil(F.R_out / h));
    long total = 1;
    for (int k = 0; k < n - 1; ++k) total *= F.cells;
    F.fibers.resize(total);
    const double reach = F.R_out + 0.5 * h * std::sqrt(n - 1.0);
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
        Vec yc = F.cell_center(static_cast<long>(i));
        if (yc.norm() > reach) return;
        Vec y = F.basis * yc;
        F.fibers[i] = extract_fiber(K, y, F.u, F.R_out, s_res, bisect_tol);
    });
    return F;
}

FiberField map_fibers(const FiberField& F, const std::function<IntervalUnion(const IntervalUnion&)>& fn) {
    FiberField G = F;
    parallel_for(G.fibers.size(), [&](std::size_t i) {
        if (G.fibers[i]) G.fibers[i] = fn(*G.fibers[i]);
    });
    return G;
}

StarBody reconstruct_from_membership(const std::function<bool(const Vec&)>& inside, const StarBody& reference,
                                     double R_out, const SteinerParams& p) {
    const auto& g = reference.grid();
    const double eps_in = 1e-6 * R_out;
    std::vector<double> rho(g.size());
    parallel_for(g.size(), [&](std::size_t i) {
        const Vec& th = g.node(i);
        if (!inside(eps_in * th)) {
            std::ostringstream os;
            os << "reconstruct: origin is not interior along node " << i;
            throw GeometryError(os.str());
        }
        const int M = std::max(1, p.ray_steps);
        double lo = eps_in, hi = R_out / M;
        for (int k = M; k >= 1; --k) {
            double r = R_out * k / M;
            if (inside(r * th)) {
                lo = r;
                hi = std::min(R_out, r + R_out / M);
                break;
            }
        }
        if (lo >= hi) {
            rho[i] = lo;
            return;
        }
        while (hi - lo > p.bisect_tol * R_out) {
            double mid = 0.5 * (lo + hi);
            if (inside(mid * th)) lo = mid;
            else hi = mid;
        }
        rho[i] = 0.5 * (lo + hi);
    });
    return StarBody(reference.grid_ptr(), std::move(rho), p.result_interp);
}

StarBody reconstruct(const FiberField& F, const StarBody& reference, const SteinerParams& p) {
    auto inside = [&](const Vec& x) {
        const auto* f = F.fiber_near(x);
        return f && f->has_value() && (*f)->contains(x.dot(F.u));
    };
    return reconstruct_from_membership(inside, reference, F.R_out, p);
}

namespace {

double default_h(const StarBody& K, const SteinerParams& p) { return p.h > 0 ? p.h : K.max_rho() / 64.0; }

StarBody transformed_body(const StarBody& K, const Vec& u, const SteinerParams& p,
                          const std::function<IntervalUnion(const IntervalUnion&)>& fn) {
    if (std::abs(u.norm() - 1.0) > 1e-10) throw DomainError("steiner: u must be a unit vector");
    const double R_out = outer_radius(K);
    if (p.mode == FiberMode::Grid) {
        FiberField F = extract_fibers(K, u, default_h(K, p), p.s_res, p.bisect_tol);
        return reconstruct(map_fibers(F, fn), K, p);
    }
    auto inside = [&](const Vec& x) {
        double s = x.dot(u);
        auto f = extract_fiber(K, x - s * u, u, R_out, p.s_res, p.bisect_tol);
        return f.has_value() && fn(*f).contains(s);
    };
    return reconstruct_from_membership(inside, K, R_out, p);
}

}  // namespace

StarBody steiner_symmetrize(const StarBody& K, const Vec& u, const SteinerParams& p) {
    return transformed_body(K, u, p, [](const IntervalUnion& J) { return centered(J); });
}

StarBody continuous_steiner(const StarBody& K, const Vec& u, double t, const SteinerParams& p) {
    if (!(t >= 0 && t <= 1)) throw DomainError("continuous_steiner: t must lie in [0, 1]");
    return transformed_body(K, u, p, [t](const IntervalUnion& J) { return flow(J, t); });
}

SteinerFlowReport flow_report(const StarBody& K, const Vec& u, const std::vector<double>& t_samples,
                              const SteinerParams& p) {
    for (std::size_t i = 0; i < t_samples.size(); ++i) {
        if (!(t_samples[i] >= 0 && t_samples[i] <= 1)) throw DomainError("flow_report: t outside [0, 1]");
        if (i && t_samples[i] < t_samples[i - 1]) throw DomainError("flow_report: t_samples must be sorted");
    }
    SteinerFlowReport r;
    r.u = u;
    r.t_samples = t_samples;
    r.reference_volume = volume(K);
    r.reference_ivolume = volume(intersection_body(K, p.radon));
    std::optional<FiberField> F;
    if (p.mode == FiberMode::Grid) F = extract_fibers(K, u, default_h(K, p), p.s_res, p.bisect_tol);
    for (double t : t_samples) {
        StarBody Kt = F ? reconstruct(map_fibers(*F, [t](const IntervalUnion& J) { return flow(J, t); }), K, p)
                        : continuous_steiner(K, u, t, p);
        r.volumes.push_back(volume(Kt));
        r.intersection_body_volumes.push_back(volume(intersection_body(Kt, p.radon)));
        for (std::size_t i = 0; i < Kt.rho().size(); ++i) {
            double q = Kt.rho()[i] / K.rho()[i];
            r.ratio_max = std::max(r.ratio_max, q);
            r.ratio_min = std::min(r.ratio_min, q);
            if (t > 0) r.fitted_M = std::max(r.fitted_M, (std::max(q, 1.0 / q) - 1.0) / t);
        }
    }
    r.bound_M = K.max_rho() * lipschitz_estimate(K).gauge;
    return r;
}

nlohmann::json to_json(const FiberField& F) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t i = 0; i < F.fibers.size(); ++i) {
        if (!F.fibers[i]) continue;
        Vec yc = F.cell_center(static_cast<long>(i));
        nlohmann::json iv = nlohmann::json::array();
        for (auto [a, b] : F.fibers[i]->intervals()) iv.push_back({a, b});
        cells.push_back({{"y", std::vector<double>(yc.data(), yc.data() + yc.size())}, {"intervals", iv}});
    }
    return {{"u", std::vector<double>(F.u.data(), F.u.data() + F.u.size())},
            {"h", F.h},
            {"R_out", F.R_out},
            {"cells_per_axis", F.cells},
            {"fibers", cells}};
}

nlohmann::json to_json(const SteinerFlowReport& r) {
    return {{"u", std::vector<double>(r.u.data(), r.u.data() + r.u.size())},
            {"t", r.t_samples},
            {"volume", r.volumes},
            {"intersection_body_volume", r.intersection_body_volumes},
            {"reference_volume", r.reference_volume},
            {"reference_intersection_body_volume", r.reference_ivolume},
            {"ratio_max", r.ratio_max},
            {"ratio_min", r.ratio_min},
            {"fitted_M", r.fitted_M},
            {"bound_M", r.bound_M}};
}

}  // namespace geotomo

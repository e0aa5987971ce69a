#include "geotomo/volume_functionals.hpp"

#include <algorithm>
#include <cmath>

#include "geotomo/determinant_geometry.hpp"
#include "geotomo/errors.hpp"
#include "geotomo/steiner.hpp"

namespace geotomo {

namespace {

Vec random_direction(int n, Rng& rng) {
    Vec v(n);
    double nv;
    do {
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
        nv = v.norm();
    } while (nv < 1e-12);
    return v / nv;
}

// Running sums for a set of quantities.
struct Moments {
    std::vector<long double> s, s2;
    long count = 0;
    explicit Moments(std::size_t k = 0) : s(k, 0), s2(k, 0) {}
    void add(const std::vector<double>& x) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            s[i] += x[i];
            s2[i] += static_cast<long double>(x[i]) * x[i];
        }
        ++count;
    }
    void merge(const Moments& o) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] += o.s[i];
            s2[i] += o.s2[i];
        }
        count += o.count;
    }
    double mean(std::size_t i) const { return static_cast<double>(s[i] / count); }
    double se(std::size_t i) const {
        if (count < 2) return 0.0;
        long double m = s[i] / count;
        long double var = (s2[i] - count * m * m) / (count - 1);
        return static_cast<double>(std::sqrt(std::max<long double>(0, var) / count));
    }
};

// Unit normal and (n-1)-volume of the span of n-1 vectors in R^n (generalized cross product).
double cross_normal(const std::vector<Vec>& xs, Vec& normal) {
    const int n = static_cast<int>(xs[0].size());
    Mat M(n - 1, n);
    for (int i = 0; i < n - 1; ++i) M.row(i) = xs[i].transpose();
    normal.resize(n);
    for (int j = 0; j < n; ++j) {
        Mat S(n - 1, n - 1);
        for (int k = 0, c = 0; k < n; ++k)
            if (k != j) S.col(c++) = M.col(k);
        double d = S.determinant();
        normal[j] = j % 2 ? -d : d;
    }
    double vol = normal.norm();
    if (vol > 0) normal /= vol;
    return vol;
}

std::vector<double> extrapolation_weights(const std::vector<double>& ps) {
    // intercept of the least-squares line through (p + 1, value)
    const std::size_t k = ps.size();
    if (k == 1) return {1.0};
    double xb = 0;
    for (double p : ps) xb += p + 1.0;
    xb /= k;
    double sxx = 0;
    for (double p : ps) sxx += (p + 1.0 - xb) * (p + 1.0 - xb);
    std::vector<double> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = 1.0 / k - xb * (ps[i] + 1.0 - xb) / sxx;
    return c;
}

}  // namespace

Vec sample_in_body(const StarBody& K, Rng& rng) {
    const int n = K.dim();
    // direction density must be proportional to rho^n; accept against the outer radius
    const double Rb = outer_radius(K);
    while (true) {
        Vec th = random_direction(n, rng);
        double rho = K.radial(th);
        if (rng.uniform() * std::pow(Rb, n) <= std::pow(rho, n))
            return rho * std::pow(rng.uniform(), 1.0 / n) * th;
    }
}

MCEstimate estimate_I0(const StarBody& K, long n_samples, std::uint64_t seed, const I0Params& prm) {
    const auto& ps = prm.p_schedule;
    if (ps.empty()) throw DomainError("estimate_I0: empty p schedule");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!(ps[i] > -1.0 && ps[i] < 0.0)) throw DomainError("estimate_I0: p values must lie in (-1, 0)");
        if (i && !(ps[i] < ps[i - 1])) throw DomainError("estimate_I0: p schedule must decrease toward -1");
    }
    if (n_samples < 2) throw DomainError("estimate_I0: need at least two samples");
    const int n = K.dim();
    const std::size_t kp = ps.size();
    const double volK = volume(K);
    const double Rc = outer_radius(K);
    const double Vd = unit_ball_volume(n - 1) * std::pow(Rc, n - 1);
    const auto cw = extrapolation_weights(ps);
    const int B = std::max(1, prm.blocks);

    std::vector<Moments> acc(B, Moments(kp + 1));
    std::vector<long> degen(B, 0);
    parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        long lo = n_samples * static_cast<long>(b) / B, hi = n_samples * static_cast<long>(b + 1) / B;
        std::vector<double> x(kp + 1);
        std::vector<Vec> pts(n);
        Vec normal;
        for (long s = lo; s < hi;) {
            if (prm.method == I0Method::Naive) {
                for (int i = 0; i < n; ++i) pts[i] = sample_in_body(K, rng);
                Mat M(n, n);
                for (int i = 0; i < n; ++i) M.col(i) = pts[i];
                double delta = std::abs(M.determinant());
                if (!(delta > 1e-300)) {
                    ++degen[b];
                    continue;
                }
                for (std::size_t k = 0; k < kp; ++k)
                    x[k] = (ps[k] + 1.0) / n * std::pow(volK, n) * std::pow(delta, ps[k]);
            } else {
                for (int i = 0; i < n - 1; ++i) pts[i] = sample_in_body(K, rng);
                double delta = n == 1 ? 1.0 : cross_normal(std::vector<Vec>(pts.begin(), pts.end() - 1), normal);
                if (!(delta > 1e-12 * std::pow(Rc, n - 1))) {
                    ++degen[b];
                    continue;
                }
                double U = rng.uniform_pos();
                double sgn = rng.uniform() < 0.5 ? -1.0 : 1.0;
                // uniform point of the (n-1)-disc of radius Rc in normal-perp
                Vec w = random_direction(n, rng);
                w -= w.dot(normal) * normal;
                double nw = w.norm();
                if (nw < 1e-12) {
                    ++degen[b];
                    continue;
                }
                w *= Rc * std::pow(rng.uniform(), 1.0 / (n - 1)) / nw;
                for (std::size_t k = 0; k < kp; ++k) {
                    double q = ps[k] + 1.0;
                    double sh = sgn * Rc * std::pow(U, 1.0 / q);
                    Vec xp = sh * normal + w;
                    double ind = K.gauge(xp) <= 1.0 ? 1.0 : 0.0;
                    x[k] = 2.0 / n * std::pow(volK, n - 1) * std::pow(delta, ps[k]) * std::pow(Rc, q) * Vd * ind;
                }
            }
            double z = 0;
            for (std::size_t k = 0; k < kp; ++k) z += cw[k] * x[k];
            x[kp] = z;
            acc[b].add(x);
            ++s;
        }
    });
    Moments tot(kp + 1);
    long dg = 0;
    for (int b = 0; b < B; ++b) {
        tot.merge(acc[b]);
        dg += degen[b];
    }
    MCEstimate e;
    e.value = tot.mean(kp);
    e.std_error = tot.se(kp);
    e.n_samples = n_samples;
    e.seed = seed;
    e.p_schedule = ps;
    for (std::size_t k = 0; k < kp; ++k) {
        e.p_values.push_back(tot.mean(k));
        e.p_errors.push_back(tot.se(k));
    }
    e.degenerate = dg;
    e.method = prm.method == I0Method::Naive ? "I0-naive" : "I0";
    bool mono = true;
    for (std::size_t k = 1; k < kp; ++k)
        if ((e.p_values[k] - e.p_values[k - 1]) * (e.p_values[1] - e.p_values[0]) < 0) mono = false;
    if (!mono) e.warning = "p-curve not monotone";
    return e;
}

IuFlowEstimate estimate_Iu_along_flow(const StarBody& K, const Vec& u_in, const std::vector<double>& ts,
                                      long n_samples, std::uint64_t seed, const IuParams& prm) {
    if (std::abs(u_in.norm() - 1.0) > 1e-10) throw DomainError("estimate_Iu: u must be a unit vector");
    if (ts.empty()) throw DomainError("estimate_Iu: no t values");
    if (n_samples < 2) throw DomainError("estimate_Iu: need at least two samples");
    const int n = K.dim();
    const std::size_t kt = ts.size();
    const Vec u = u_in;
    const Mat basis = complement_basis(u);
    const double Rc = outer_radius(K);
    const double disc = unit_ball_volume(n - 1) * std::pow(Rc, n - 1);
    const int B = std::max(1, prm.blocks);

    // per sample: X(t_k) for each k, then X(t_k) - X(t_0); fiber lengths separately
    std::vector<Moments> acc(B, Moments(2 * kt));
    std::vector<Moments> len(B, Moments(kt));
    std::vector<long> degen(B, 0), attempts(B, 0), accepted(B, 0);
    parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        long lo = n_samples * static_cast<long>(b) / B, hi = n_samples * static_cast<long>(b + 1) / B;
        std::vector<Vec> coords(n);
        std::vector<IntervalUnion> fib(n);
        std::vector<double> x(2 * kt), l(kt);
        for (long s = lo; s < hi;) {
            for (int i = 0; i < n; ++i) {
                while (true) {
                    Vec c = random_direction(n - 1 > 1 ? n - 1 : 1, rng);
                    if (n - 1 == 1) c[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
                    c *= Rc * std::pow(rng.uniform(), 1.0 / (n - 1));
                    ++attempts[b];
                    auto f = extract_fiber(K, basis * c, u, Rc, prm.s_res, prm.bisect_tol);
                    if (f) {
                        coords[i] = c;
                        fib[i] = *f;
                        ++accepted[b];
                        break;
                    }
                }
            }
            Dependency dep;
            try {
                dep = dependency_direction_coords(coords);
            } catch (const DegenerateSample&) {
                ++degen[b];
                continue;
            }
            for (std::size_t k = 0; k < kt; ++k) {
                std::vector<IntervalUnion> ft(n);
                double lsum = 0;
                for (int i = 0; i < n; ++i) {
                    ft[i] = flow(fib[i], ts[k]);
                    lsum += ft[i].length();
                }
                x[k] = box_union_section_volume(box_product(ft), dep.theta) / dep.delta;
                l[k] = lsum / n;
            }
            for (std::size_t k = 0; k < kt; ++k) x[kt + k] = x[k] - x[0];
            acc[b].add(x);
            len[b].add(l);
            ++s;
        }
    });
    Moments tot(2 * kt), tl(kt);
    long dg = 0, att = 0, accn = 0;
    for (int b = 0; b < B; ++b) {
        tot.merge(acc[b]);
        tl.merge(len[b]);
        dg += degen[b];
        att += attempts[b];
        accn += accepted[b];
    }
    const double rate = static_cast<double>(accn) / att;
    const double areaPK = disc * rate;
    const double scale = 2.0 / n * std::pow(areaPK, n);
    // relative variance of |PK|^n from the binomial acceptance rate
    const double rel_area_var = (1.0 - rate) / (rate * att);

    IuFlowEstimate out;
    out.t = ts;
    for (std::size_t k = 0; k < kt; ++k) {
        MCEstimate e;
        double m = tot.mean(k), se = tot.se(k);
        e.value = scale * m;
        double rel2 = (m != 0 ? (se / m) * (se / m) : 0.0) + n * n * rel_area_var;
        e.std_error = std::abs(e.value) * std::sqrt(rel2);
        e.n_samples = n_samples;
        e.seed = seed;
        e.degenerate = dg;
        e.attempts = att;
        e.method = "Iu";
        if (dg > 0.01 * (n_samples + dg)) e.warning = "degenerate-sample rate above 1%";
        out.iu.push_back(e);
        out.diff.push_back(scale * tot.mean(kt + k));
        out.diff_se.push_back(scale * tot.se(kt + k));
        out.volume.push_back(areaPK * tl.mean(k));
        out.volume_diff.push_back(areaPK * (tl.mean(k) - tl.mean(0)));
    }
    return out;
}

MCEstimate estimate_Iu(const StarBody& K, const Vec& u, long n_samples, std::uint64_t seed, const IuParams& p) {
    return estimate_Iu_along_flow(K, u, {0.0}, n_samples, seed, p).iu[0];
}

BusemannGap busemann_gap(const StarBody& K, const RadonParams& p) {
    const int n = K.dim();
    double lhs = volume(intersection_body(K, p));
    double r = std::pow(volume(K) / unit_ball_volume(n), 1.0 / n);
    StarBody ball = materialize(BodySpec::ball(n, r), K.grid_ptr());
    double rhs = volume(intersection_body(ball, p));
    return {lhs, rhs, rhs - lhs, (rhs - lhs) / rhs};
}

}  // namespace geotomo

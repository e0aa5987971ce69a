#include "geotomo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "geotomo/errors.hpp"
#include "geotomo/parallel.hpp"
#include "geotomo/steiner.hpp"

namespace geotomo {

std::vector<Vec> sample_directions(int dim, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec> out;
    while (static_cast<int>(out.size()) < count) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = rng.normal();
        double nv = v.norm();
        if (nv < 1e-12) continue;
        v /= nv;
        if (v.cwiseAbs().maxCoeff() > std::cos(1e-6)) continue;
        out.push_back(v);
    }
    return out;
}

MidpointReport midpoint_report(const StarBody& K, const Vec& u, double delta, int base_resolution, int s_res) {
    if (std::abs(u.norm() - 1.0) > 1e-10) throw DomainError("midpoint_report: u must be a unit vector");
    if (!(delta > 0) || !(delta < K.min_rho())) throw DomainError("midpoint_report: delta must lie in (0, inradius)");
    if (base_resolution < 2) throw DomainError("midpoint_report: base_resolution must be >= 2");
    const int n = K.dim(), m = n - 1;
    MidpointReport r;
    r.u = u;
    r.delta = delta;
    r.scale = K.max_rho();
    const Mat basis = complement_basis(u);
    const double R_out = outer_radius(K);
    // tensor grid over [-delta, delta]^m, clipped to the disc
    long total = 1;
    for (int k = 0; k < m; ++k) total *= base_resolution;
    for (long i = 0; i < total; ++i) {
        Vec yc(m);
        long j = i;
        for (int k = 0; k < m; ++k) {
            yc[k] = -delta + 2.0 * delta * (j % base_resolution) / (base_resolution - 1);
            j /= base_resolution;
        }
        if (yc.norm() <= delta * (1 + 1e-12)) r.base_points.push_back(yc);
    }
    r.midpoints.resize(r.base_points.size());
    parallel_for(r.base_points.size(), [&](std::size_t i) {
        auto f = extract_fiber(K, basis * r.base_points[i], u, R_out, s_res);
        if (!f || f->size() != 1) {
            std::ostringstream os;
            os << "midpoint_report: fiber over y = (" << r.base_points[i].transpose()
               << ") is not a single interval; delta too large";
            throw GeometryError(os.str());
        }
        r.midpoints[i] = 0.5 * (f->lo() + f->hi());
    });
    Eigen::MatrixXd A(r.base_points.size(), m);
    Eigen::VectorXd b(r.base_points.size());
    for (std::size_t i = 0; i < r.base_points.size(); ++i) {
        for (int k = 0; k < m; ++k) A(i, k) = r.base_points[i][k];
        b[i] = r.midpoints[i];
    }
    Eigen::VectorXd fit = A.colPivHouseholderQr().solve(b);
    r.fit = Vec(m);
    for (int k = 0; k < m; ++k) r.fit[k] = fit[k];
    double res = (A * fit - b).cwiseAbs().maxCoeff();
    r.residual = res / r.scale;
    return r;
}

DetectorResult ellipsoid_detector(const StarBody& K, const std::vector<Vec>& directions, double delta,
                                  double threshold, int base_resolution) {
    DetectorResult d;
    d.threshold = threshold;
    d.delta = delta > 0 ? delta : 0.5 * K.min_rho();
    d.directions = directions;
    for (const auto& u : directions) {
        auto r = midpoint_report(K, u, d.delta, base_resolution);
        d.residuals.push_back(r.residual);
        d.max_residual = std::max(d.max_residual, r.residual);
    }
    d.ellipsoid_consistent = d.max_residual < threshold;
    return d;
}

namespace {

std::vector<DirectionDerivatives> derivatives(const StarBody& K, double c, const std::vector<Vec>& dirs,
                                              double t_step, const StationarityParams& p) {
    const int n = K.dim();
    std::vector<DirectionDerivatives> out;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        DirectionDerivatives d;
        d.u = dirs[i];
        try {
            auto e = estimate_Iu_along_flow(K, dirs[i], {0.0, t_step}, p.n_samples, derive_seed(p.seed, i), p.iu);
            d.dt_volume = e.volume_diff[1] / t_step;
            d.dt_IvolK = e.diff[1] / t_step;
            d.dt_IvolK_se = e.diff_se[1] / t_step;
            d.dt_F = d.dt_IvolK - (n - 1) * c * d.dt_volume;
        } catch (const GeometryError& err) {
            d.ok = false;
            d.error = err.what();
            std::fprintf(stderr, "stationarity: direction %zu skipped: %s\n", i, err.what());
        }
        out.push_back(d);
    }
    return out;
}

}  // namespace

StationarityReport stationarity_report(const StarBody& K, double c, const std::vector<Vec>& directions,
                                       double t_step, const StationarityParams& p) {
    if (!(c > 0)) throw DomainError("stationarity_report: c must be positive");
    if (!(t_step > 0 && t_step <= 0.1)) throw DomainError("stationarity_report: t_step must lie in (0, 0.1]");
    const int n = K.dim();
    StationarityReport r;
    r.c_best = c;
    r.t_step = t_step;
    r.body = derivatives(K, c, directions, t_step, p);
    double rb = std::pow(volume(K) / unit_ball_volume(n), 1.0 / n);
    StarBody B = materialize(BodySpec::ball(n, rb), K.grid_ptr());
    // I^2 B_r = omega_{n-1}^n r^{(n-1)^2 - 1} B_r
    double cb = std::pow(unit_ball_volume(n - 1), n) * std::pow(rb, (n - 1) * (n - 1) - 1);
    r.ball = derivatives(B, cb, directions, t_step, p);
    double bv = 0, bi = 0;
    for (const auto& d : r.ball) {
        if (!d.ok) continue;
        bv = std::max(bv, std::abs(d.dt_volume));
        bi = std::max(bi, std::abs(d.dt_IvolK));
    }
    // a relative floor at the level of double rounding keeps the comparison meaningful
    // when the ball run is exactly noise-free
    double volK = volume(K);
    double ivolB = unit_ball_volume(n) * std::pow(unit_ball_volume(n - 1) * std::pow(rb, n - 1), n);
    r.noise_floor_volume = std::max(3.0 * bv, 1e-9 * volK);
    r.noise_floor_ivol = std::max(3.0 * bi, 1e-9 * ivolB);
    for (std::size_t i = 0; i < r.body.size(); ++i)
        if (r.body[i].ok && r.body[i].dt_IvolK > r.noise_floor_ivol) r.flagged.push_back(i);
    return r;
}

namespace {

std::vector<double> vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json dir_json(const DirectionDerivatives& d) {
    nlohmann::json j{{"u", vec_json(d.u)}, {"ok", d.ok}};
    if (d.ok) {
        j["dt_volume"] = d.dt_volume;
        j["dt_IvolK"] = d.dt_IvolK;
        j["dt_IvolK_se"] = d.dt_IvolK_se;
        j["dt_F"] = d.dt_F;
    } else {
        j["error"] = d.error;
    }
    return j;
}

}  // namespace

nlohmann::json to_json(const MidpointReport& r) {
    return {{"u", vec_json(r.u)}, {"delta", r.delta}, {"fit", vec_json(r.fit)}, {"residual", r.residual},
            {"scale", r.scale}, {"base_points", r.base_points.size()}};
}

nlohmann::json to_json(const DetectorResult& r) {
    nlohmann::json dirs = nlohmann::json::array();
    for (std::size_t i = 0; i < r.directions.size(); ++i)
        dirs.push_back({{"u", vec_json(r.directions[i])}, {"residual", r.residuals[i]}});
    return {{"verdict", r.ellipsoid_consistent ? "ellipsoid-consistent" : "not-consistent"},
            {"threshold", r.threshold},
            {"delta", r.delta},
            {"max_residual", r.max_residual},
            {"directions", dirs}};
}

nlohmann::json to_json(const StationarityReport& r) {
    nlohmann::json body = nlohmann::json::array(), ball = nlohmann::json::array();
    for (const auto& d : r.body) body.push_back(dir_json(d));
    for (const auto& d : r.ball) ball.push_back(dir_json(d));
    return {{"c_best", r.c_best},
            {"t_step", r.t_step},
            {"noise_floor_volume", r.noise_floor_volume},
            {"noise_floor_ivol", r.noise_floor_ivol},
            {"flagged", r.flagged},
            {"directions", body},
            {"ball_calibration", ball}};
}

}  // namespace geotomo

#include "geotomo/radon.hpp"

#include <algorithm>
#include <cmath>

#include "geotomo/errors.hpp"
#include "geotomo/parallel.hpp"

namespace geotomo {

int default_circle_resolution(const SphereGrid& g) {
    return std::max(16, static_cast<int>(std::lround(4.0 * std::sqrt(static_cast<double>(g.size())))));
}

RadonField radon(const SphereGridPtr& grid, const std::function<double(const Vec&)>& f, const RadonParams& p) {
    const int n = grid->dim();
    const int res = p.circle_resolution > 0 ? p.circle_resolution : default_circle_resolution(*grid);
    std::vector<double> cs(res), sn(res);
    for (int k = 0; k < res; ++k) {
        cs[k] = std::cos(2.0 * M_PI * k / res);
        sn[k] = std::sin(2.0 * M_PI * k / res);
    }
    RadonField out{grid, std::vector<double>(grid->size())};
    parallel_for(grid->size(), [&](std::size_t i) {
        const Vec& u = grid->node(i);
        double s = 0;
        if (n == 3) {
            Mat B = complement_basis(u);
            Vec a = B.col(0), b = B.col(1);
            for (int k = 0; k < res; ++k) {
                Vec v = cs[k] * a + sn[k] * b;
                s += f(v);
            }
            s /= res;
        } else {
            CircleRule r = subsphere_rule(u, res, derive_seed(p.seed, i));
            for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * f(r.nodes[k]);
        }
        if (!std::isfinite(s)) throw NumericError("radon: non-finite value");
        out.values[i] = s;
    });
    return out;
}

RadonField radon(const SphereGridPtr& grid, const std::vector<double>& f, Interpolation interp, const RadonParams& p) {
    if (f.size() != grid->size()) throw DomainError("radon: field size does not match grid");
    for (double v : f)
        if (!std::isfinite(v)) throw NumericError("radon: non-finite input");
    if (interp.kind == Interpolation::Kind::Analytic) interp = Interpolation::nearest();
    // reuse the star-body interpolation machinery on a shifted copy (values may be <= 0)
    double shift = 0;
    for (double v : f) shift = std::min(shift, v);
    shift = 1.0 - shift;
    std::vector<double> g(f);
    for (double& v : g) v += shift;
    StarBody carrier(grid, g, interp);
    auto r = radon(grid, [&](const Vec& x) { return carrier.radial(x); }, p);
    for (double& v : r.values) v -= shift;
    return r;
}

StarBody intersection_body(const StarBody& K, const RadonParams& p) {
    const int n = K.dim();
    auto r = radon(K.grid_ptr(), [&](const Vec& x) { return std::pow(K.radial(x), n - 1); }, p);
    const double w = unit_ball_volume(n - 1);
    for (double& v : r.values) v *= w;
    return StarBody(K.grid_ptr(), std::move(r.values), p.derived);
}

double radon_selfadjoint_residual(const SphereGridPtr& grid, const std::vector<double>& f,
                                  const std::vector<double>& g, Interpolation interp, const RadonParams& p) {
    auto rf = radon(grid, f, interp, p);
    auto rg = radon(grid, g, interp, p);
    std::vector<double> a(f.size()), b(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        a[i] = rf.values[i] * g[i];
        b[i] = f[i] * rg.values[i];
    }
    double lhs = quadrature(*grid, a), rhs = quadrature(*grid, b);
    return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

double radon_multiplier3(int m) {
    if (m < 0) throw DomainError("radon_multiplier3: negative degree");
    if (m % 2) return 0.0;
    double v = 1.0;
    for (int k = 2; k <= m; k += 2) v *= -static_cast<double>(k - 1) / k;
    return v;
}

std::vector<double> radon_multipliers3(int L) {
    std::vector<double> v;
    for (int m = 0; m <= L; ++m) v.push_back(radon_multiplier3(m));
    return v;
}

double radon_eigenvalue3(const SphereGridPtr& grid, int m, const RadonParams& p) {
    if (grid->dim() != 3) throw DomainError("radon_eigenvalue3: needs a grid on S^2");
    if (m < 0) throw DomainError("radon_eigenvalue3: m must be >= 0");
    Vec a(3);
    a << 0.3, -0.5, 0.8;
    a /= a.norm();
    auto Q = [&](const Vec& x) { return std::legendre(static_cast<unsigned>(m), std::clamp(a.dot(x), -1.0, 1.0)); };
    auto RQ = radon(grid, Q, p);
    std::vector<double> num(grid->size()), den(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        double q = Q(grid->node(i));
        num[i] = RQ.values[i] * q;
        den[i] = q * q;
    }
    return quadrature(*grid, num) / quadrature(*grid, den);
}

std::vector<double> real_harmonics(const Vec& x, int L) {
    if (x.size() != 3) throw ConfigError("real_harmonics: only S^2 is supported");
    const double z = std::clamp(x[2] / x.norm(), -1.0, 1.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = std::atan2(x[1], x[0]);
    std::vector<double> Y((L + 1) * (L + 1), 0.0);
    // normalized associated Legendre, mean of square over [-1,1] equal to 1
    std::vector<double> P((L + 1) * (L + 1), 0.0);
    auto at = [&](int l, int m) -> double& { return P[l * (L + 1) + m]; };
    at(0, 0) = 1.0;
    for (int m = 1; m <= L; ++m) at(m, m) = std::sqrt((2.0 * m + 1) / (2.0 * m)) * s * at(m - 1, m - 1);
    for (int m = 0; m < L; ++m) at(m + 1, m) = std::sqrt(2.0 * m + 3) * z * at(m, m);
    for (int m = 0; m <= L; ++m)
        for (int l = m + 2; l <= L; ++l) {
            double a = std::sqrt((4.0 * l * l - 1) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
            double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                                 (4.0 * (l - 1) * (l - 1) - 1));
            at(l, m) = a * (z * at(l - 1, m) - b * at(l - 2, m));
        }
    for (int l = 0; l <= L; ++l) {
        Y[l * l + l] = at(l, 0);
        for (int m = 1; m <= l; ++m) {
            Y[l * l + l + m] = std::sqrt(2.0) * at(l, m) * std::cos(m * phi);
            Y[l * l + l - m] = std::sqrt(2.0) * at(l, m) * std::sin(m * phi);
        }
    }
    return Y;
}

std::vector<double> spectral_radon3(const SphereGrid& grid, const std::vector<double>& f, int L) {
    if (grid.dim() != 3) throw ConfigError("spectral_radon3: unsupported dimension (needs n = 3)");
    if (f.size() != grid.size()) throw DomainError("spectral_radon3: field size does not match grid");
    const std::size_t nh = (L + 1) * (L + 1);
    std::vector<std::vector<double>> Y(grid.size());
    std::vector<double> coef(nh, 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        Y[j] = real_harmonics(grid.node(j), L);
        for (std::size_t k = 0; k < nh; ++k) coef[k] += grid.weight(j) * f[j] * Y[j][k];
    }
    auto nu = radon_multipliers3(L);
    for (int l = 0; l <= L; ++l)
        for (int m = -l; m <= l; ++m) coef[l * l + l + m] *= nu[l];
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j)
        for (std::size_t k = 0; k < nh; ++k) out[j] += coef[k] * Y[j][k];
    return out;
}

IterationResult iterate_I(const StarBody& K, int steps, bool renormalize, const RadonParams& p) {
    if (steps < 1) throw DomainError("iterate_I: steps must be >= 1");
    const double target = unit_ball_volume(K.dim());
    IterationResult res;
    res.bodies.push_back(renormalize ? normalize_volume(K, target) : K);
    res.eccentricity.push_back(eccentricity(res.bodies.back()));
    for (int s = 0; s < steps; ++s) {
        StarBody next = intersection_body(res.bodies.back(), p);
        for (double v : next.rho())
            if (!std::isfinite(v) || v > 1e150)
                throw NumericError("iterate_I: radial values overflow; rerun with renormalization");
        if (renormalize) next = normalize_volume(next, target);
        res.eccentricity.push_back(eccentricity(next));
        res.bodies.push_back(std::move(next));
    }
    return res;
}

FixedPointResult fixed_point_residual(const StarBody& K, int order, const RadonParams& p) {
    if (order != 1 && order != 2) throw DomainError("fixed_point_residual: order must be 1 or 2");
    StarBody J = intersection_body(K, p);
    if (order == 2) J = intersection_body(J, p);
    const auto& g = K.grid();
    std::vector<double> logr(g.size()), r(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        r[i] = J.rho()[i] / K.rho()[i];
        logr[i] = std::log(r[i]);
    }
    double c = std::exp(quadrature(g, logr));
    double res = 0;
    for (double v : r) res = std::max(res, std::abs(v / c - 1.0));
    return {order, c, res};
}

}  // namespace geotomo

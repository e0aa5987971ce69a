#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "geotomo/sphere_grid.hpp"
#include "geotomo/star_body.hpp"

namespace geotomo {

struct RadonField {
    SphereGridPtr grid;
    std::vector<double> values;
};

struct RadonParams {
    int circle_resolution = 0;  // 0: 4 sqrt(grid size)
    std::uint64_t seed = 0;     // subsphere samples for n >= 4
    // interpolation attached to bodies produced by I (their tables have no analytic form)
    Interpolation derived = Interpolation::nearest();
};

int default_circle_resolution(const SphereGrid& g);

// Rad f at every grid node; f is evaluated on the great subspheres directly.
RadonField radon(const SphereGridPtr& grid, const std::function<double(const Vec&)>& f, const RadonParams& p = {});
// Field given on the nodes, interpolated with interp.
RadonField radon(const SphereGridPtr& grid, const std::vector<double>& f, Interpolation interp,
                 const RadonParams& p = {});

// rho_IK = omega_{n-1} Rad(rho_K^{n-1}); same grid as K.
StarBody intersection_body(const StarBody& K, const RadonParams& p = {});

double radon_selfadjoint_residual(const SphereGridPtr& grid, const std::vector<double>& f,
                                  const std::vector<double>& g, Interpolation interp, const RadonParams& p = {});

// nu_{3,m} = P_m(0)
double radon_multiplier3(int m);
std::vector<double> radon_multipliers3(int L);

// Rayleigh quotient <Rad Q, Q> / <Q, Q> on the grid for Q(x) = P_m(<a, x>), a fixed generic axis.
double radon_eigenvalue3(const SphereGridPtr& grid, int m, const RadonParams& p = {});

// Real spherical harmonics on S^2, orthonormal for the probability measure.
// Index (l, m), m in [-l, l], flattened as l*l + l + m.
std::vector<double> real_harmonics(const Vec& x, int L);
std::vector<double> spectral_radon3(const SphereGrid& grid, const std::vector<double>& f, int L);

struct IterationResult {
    std::vector<StarBody> bodies;     // K, IK, I^2 K, ...
    std::vector<double> eccentricity; // per body
};

IterationResult iterate_I(const StarBody& K, int steps, bool renormalize, const RadonParams& p = {});

struct FixedPointResult {
    int order;
    double c_best;
    double residual;
};

FixedPointResult fixed_point_residual(const StarBody& K, int order, const RadonParams& p = {});

}  // namespace geotomo

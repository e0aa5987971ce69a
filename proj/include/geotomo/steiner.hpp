#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"

#include "geotomo/interval_flow.hpp"
#include "geotomo/radon.hpp"
#include "geotomo/star_body.hpp"

namespace geotomo {

enum class FiberMode {
    Grid,   // fibers stored on a Cartesian grid over u-perp, nearest-cell lookup
    Exact,  // fiber through the query point extracted on demand
};

struct SteinerParams {
    double h = 0.0;          // fiber cell size; 0 -> circumradius / 64
    int s_res = 128;         // samples per line during fiber extraction
    double bisect_tol = 1e-10;  // relative to R_out
    FiberMode mode = FiberMode::Exact;
    int ray_steps = 16;      // coarse march before bisection in reconstruct
    RadonParams radon;       // used for |I(.)| in flow reports
    Interpolation result_interp = Interpolation::nearest();
};

// Radius used for fiber lines and rays: 1.1 x largest node radius.
double outer_radius(const StarBody& K);

// K cap (y + R u), s-coordinates in [-R_out, R_out]. Empty optional if the line misses K.
std::optional<IntervalUnion> extract_fiber(const StarBody& K, const Vec& y, const Vec& u, double R_out, int s_res,
                                           double bisect_tol = 1e-10);

class FiberField {
public:
    Vec u;
    Mat basis;      // n x (n-1), orthonormal basis of u-perp
    double h = 0;   // cell size
    double R_out = 0;
    int cells = 0;  // per axis
    std::vector<std::optional<IntervalUnion>> fibers;  // cells^(n-1), row-major

    int dim() const { return static_cast<int>(u.size()); }
    // cell coordinates -> flat index, -1 if outside the grid
    long index_of(const Vec& ycoords) const;
    Vec cell_center(long idx) const;  // coordinates in the basis
    const std::optional<IntervalUnion>* fiber_near(const Vec& x) const;  // x in R^n
    std::size_t present() const;
};

FiberField extract_fibers(const StarBody& K, const Vec& u, double h, int s_res, double bisect_tol = 1e-10);
// Applies fn to every present fiber.
FiberField map_fibers(const FiberField& F, const std::function<IntervalUnion(const IntervalUnion&)>& fn);

StarBody reconstruct(const FiberField& F, const StarBody& reference, const SteinerParams& p = {});
// Radial resampling of a set given by a membership oracle that is star-shaped about 0.
StarBody reconstruct_from_membership(const std::function<bool(const Vec&)>& inside, const StarBody& reference,
                                     double R_out, const SteinerParams& p = {});

StarBody steiner_symmetrize(const StarBody& K, const Vec& u, const SteinerParams& p = {});
StarBody continuous_steiner(const StarBody& K, const Vec& u, double t, const SteinerParams& p = {});

struct SteinerFlowReport {
    Vec u;
    std::vector<double> t_samples;
    std::vector<double> volumes;
    std::vector<double> intersection_body_volumes;
    double ratio_max = 1.0;      // max over nodes and t of rho_t / rho_K
    double ratio_min = 1.0;      // min of the same
    double fitted_M = 0.0;       // smallest M with 1/(1+Mt) <= ratio <= 1+Mt on the samples
    double bound_M = 0.0;        // circumradius x gauge Lipschitz estimate
    double reference_volume = 0.0;   // |K|
    double reference_ivolume = 0.0;  // |IK| on K's own interpolation
};

SteinerFlowReport flow_report(const StarBody& K, const Vec& u, const std::vector<double>& t_samples,
                              const SteinerParams& p = {});

nlohmann::json to_json(const FiberField& F);
nlohmann::json to_json(const SteinerFlowReport& r);

}  // namespace geotomo

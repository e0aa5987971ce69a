#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "geotomo/star_body.hpp"
#include "geotomo/volume_functionals.hpp"

namespace geotomo {

// Seeded uniform directions, rejecting those within 1e-6 rad of a coordinate axis.
std::vector<Vec> sample_directions(int dim, int count, std::uint64_t seed);

struct MidpointReport {
    Vec u;
    double delta = 0;
    std::vector<Vec> base_points;   // coordinates in a basis of u-perp
    std::vector<double> midpoints;  // chord midpoint along u per base point
    Vec fit;                        // m(y) ~ <fit, y>
    double residual = 0;            // max |m - fit| / circumradius
    double scale = 0;
};

MidpointReport midpoint_report(const StarBody& K, const Vec& u, double delta, int base_resolution = 21,
                               int s_res = 256);

// Midpoint residual threshold (relative to circumradius) separating ellipsoids.
inline constexpr double kEllipsoidThreshold = 3e-3;

struct DetectorResult {
    bool ellipsoid_consistent = false;
    double threshold = kEllipsoidThreshold;
    double delta = 0;
    std::vector<Vec> directions;
    std::vector<double> residuals;
    double max_residual = 0;
};

// delta <= 0 selects half the inradius estimate.
DetectorResult ellipsoid_detector(const StarBody& K, const std::vector<Vec>& directions, double delta = 0,
                                  double threshold = kEllipsoidThreshold, int base_resolution = 21);

struct StationarityParams {
    long n_samples = 20000;
    std::uint64_t seed = 1;
    IuParams iu;
};

struct DirectionDerivatives {
    Vec u;
    double dt_volume = 0;
    double dt_IvolK = 0;
    double dt_IvolK_se = 0;
    double dt_F = 0;  // dt_IvolK - (n-1) c dt_volume
    bool ok = true;
    std::string error;
};

struct StationarityReport {
    double c_best = 0;
    double t_step = 0;
    std::vector<DirectionDerivatives> body;
    std::vector<DirectionDerivatives> ball;  // calibration run on the ball of equal volume
    double noise_floor_volume = 0;
    double noise_floor_ivol = 0;
    std::vector<std::size_t> flagged;  // directions with dt_IvolK above the floor
};

// Right derivatives of |S_u^t K| and |I(S_u^t K)| at t = 0 by forward differences.
// Both come from the same sampled fibers at t = 0 and t = t_step.
StationarityReport stationarity_report(const StarBody& K, double c, const std::vector<Vec>& directions,
                                       double t_step = 0.02, const StationarityParams& p = {});

nlohmann::json to_json(const MidpointReport& r);
nlohmann::json to_json(const DetectorResult& r);
nlohmann::json to_json(const StationarityReport& r);

}  // namespace geotomo

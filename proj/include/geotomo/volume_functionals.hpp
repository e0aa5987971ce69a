#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geotomo/parallel.hpp"
#include "geotomo/radon.hpp"
#include "geotomo/star_body.hpp"

namespace geotomo {

struct MCEstimate {
    double value = 0;
    double std_error = 0;
    long n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<double> p_schedule;
    // I0 only: estimates at each p before extrapolation
    std::vector<double> p_values;
    std::vector<double> p_errors;
    long degenerate = 0;   // resampled tuples
    long attempts = 0;     // Iu: projection candidates drawn
    std::string method;
    std::string warning;
};

// Uniform point of K (polar sampling).
Vec sample_in_body(const StarBody& K, Rng& rng);

enum class I0Method {
    // Condition on x_1..x_{n-1}; the last point is drawn with density ~ |<x, theta>|^p
    // across the slab normal to their span.
    SlabImportance,
    // Plain average of Delta(x_1..x_n)^p over uniform tuples. Infinite variance for p < -1/2.
    Naive,
};

struct I0Params {
    std::vector<double> p_schedule{-0.99, -0.999, -0.9999, -0.99999};
    I0Method method = I0Method::SlabImportance;
    int blocks = 64;  // fixed partition of the sample stream
};

MCEstimate estimate_I0(const StarBody& K, long n_samples, std::uint64_t seed, const I0Params& p = {});

struct IuParams {
    int s_res = 128;
    double bisect_tol = 1e-10;
    int blocks = 64;
};

MCEstimate estimate_Iu(const StarBody& K, const Vec& u, long n_samples, std::uint64_t seed, const IuParams& p = {});

// The Iu integrand and the fiber (Cavalieri) volume evaluated on S_u^t K for several t,
// all from the same sampled tuples.
struct IuFlowEstimate {
    std::vector<double> t;
    std::vector<MCEstimate> iu;
    std::vector<double> volume;
    // Iu(t_k) - Iu(t_0) with standard errors of the paired differences
    std::vector<double> diff;
    std::vector<double> diff_se;
    std::vector<double> volume_diff;
};

IuFlowEstimate estimate_Iu_along_flow(const StarBody& K, const Vec& u, const std::vector<double>& t, long n_samples,
                                      std::uint64_t seed, const IuParams& p = {});

// Relative tolerance of the quadrature |IK| used by the Busemann comparison.
inline constexpr double kBusemannTolerance = 2e-3;

struct BusemannGap {
    double lhs;  // |IK|
    double rhs;  // |I B_K|, B_K the centered ball with |B_K| = |K|
    double gap;  // rhs - lhs
    double relative_gap;
};

BusemannGap busemann_gap(const StarBody& K, const RadonParams& p = {});

}  // namespace geotomo

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geotomo/interval_flow.hpp"
#include "geotomo/vec.hpp"

namespace geotomo {

// Axis-parallel box prod [c_i - l_i, c_i + l_i].
struct Box {
    Vec c;
    Vec l;
};

struct BoxUnion {
    std::vector<Box> boxes;
};

// Product of one interval union per axis, expanded into boxes.
BoxUnion box_product(const std::vector<IntervalUnion>& fibers);

// m-volume of the parallelotope spanned by x_1..x_m (Gram determinant root).
double parallelotope_volume(const std::vector<Vec>& xs);

struct Dependency {
    Vec theta;     // unit, first nonzero coordinate positive
    double delta;  // volume spanned by the n-1 rows of the coordinate matrix
};

/// Unit theta with sum theta_i y_i = 0 for y_1..y_n in u-perp.
/// Throws DegenerateSample when the points are (nearly) linearly dependent.
Dependency dependency_direction(const std::vector<Vec>& ys, const Vec& u);
// Same, with the y_i already given as coordinates in a basis of u-perp (length n-1).
Dependency dependency_direction_coords(const std::vector<Vec>& coords);

// (n-1)-volume of R cap {<theta, x> = offset}.
double box_section_volume(const Box& R, const Vec& theta, double offset);
double box_union_section_volume(const BoxUnion& RU, const Vec& theta);

// theta-perp meets every pair of opposite facets, via
//   max_R |<theta,x>| >= 2 max_i |theta_i| l_i.
// Requires R cap theta-perp nonempty (DomainError otherwise).
bool facet_criterion(const Box& R, const Vec& theta);
// Same question answered facet by facet.
bool facet_criterion_brute_force(const Box& R, const Vec& theta);

enum class EqualityTag { NoSection, Centered, NMinus1Pairs, Violated };
std::string to_string(EqualityTag t);

struct EqualityVerdict {
    EqualityTag tag;
    double derivative_estimate;  // forward difference of the recentering profile at 0
};

/**
 * Decides whether t -> |(R - t c) cap theta-perp| has zero right-derivative at 0.
 *
 * With b = <theta, c>, w_i = |theta_i| l_i, H = sum w_i and D = max w - (H - max w):
 * no section for |b| >= H (a touching face of dimension < n-2 counts as none),
 * centered for b = 0, n-1 pairs for |b| <= D, violated otherwise.
 * tol is relative to |c| + |l|. Axis directions are rejected.
 */
EqualityVerdict classify_equality(const Box& R, const Vec& theta, double tol = 1e-9);

struct BoxCase {
    Box R;
    Vec theta;
    EqualityTag intended;
};

// Seeded corpus with all four classes in turn, cycling through dims.
// Each case keeps a margin of ~10% of the relevant range from every class boundary.
std::vector<BoxCase> classifier_corpus(const std::vector<int>& dims, int count, std::uint64_t seed);

std::vector<double> recentering_profile(const Box& R, const Vec& theta, const std::vector<double>& t_samples);
double recentering_derivative(const Box& R, const Vec& theta, double h = 1e-6);

}  // namespace geotomo

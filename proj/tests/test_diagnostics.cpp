#include <gtest/gtest.h>

#include <cmath>

#include "geotomo/diagnostics.hpp"
#include "geotomo/errors.hpp"
#include "geotomo/radon.hpp"
#include "test_support.hpp"

using namespace geotomo;
using geotomo::testing::vec3;

namespace {

SphereGridPtr fib(int N) { return build_grid(3, N, GridKind::Fibonacci); }

// ball of radius 0.5 plus one thin spike close to the x axis
StarBody low_spike(const SphereGridPtr& g) {
    Vec a = vec3(std::cos(0.15), 0, std::sin(0.15));
    std::vector<double> rho(g->size());
    for (std::size_t i = 0; i < g->size(); ++i)
        rho[i] = std::acos(std::clamp(g->node(i).dot(a), -1.0, 1.0)) < 0.1 ? 2.0 : 0.5;
    return StarBody(g, rho);
}

}  // namespace

TEST(Directions, SeededUnitAwayFromAxes) {
    auto a = sample_directions(4, 50, 3), b = sample_directions(4, 50, 3);
    ASSERT_EQ(a.size(), 50u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i], b[i]);
        EXPECT_NEAR(a[i].norm(), 1.0, 1e-14);
        EXPECT_LT(a[i].cwiseAbs().maxCoeff(), std::cos(1e-6));
    }
}

TEST(Midpoints, CenteredEllipsoidMidplane) {
    auto K = materialize(BodySpec::ellipsoid({1, 2, 3}), fib(1000));
    auto r = midpoint_report(K, vec3(0, 0, 1), 0.5);
    EXPECT_LT(r.residual, 1e-6);
    EXPECT_LT(r.fit.norm(), 1e-6);
    EXPECT_GT(r.base_points.size(), 100u);
}

TEST(Midpoints, ShearedEllipsoidIsLinear) {
    Mat T = Mat::Identity(3, 3);
    T(0, 2) = 0.5;
    auto K = materialize(BodySpec::linear_image(T), fib(1000));
    auto r = midpoint_report(K, vec3(0, 0, 1), 0.4);
    EXPECT_LT(r.residual, 1e-3);
    // chord midpoints z = 0.4 x for this shear
    EXPECT_NEAR(r.fit[0] * complement_basis(vec3(0, 0, 1))(0, 0) + r.fit[1] * complement_basis(vec3(0, 0, 1))(0, 1),
                0.4, 1e-6);
}

TEST(Midpoints, CubeIsNotPlanar) {
    auto K = materialize(BodySpec::cube(3, 1), fib(1000));
    auto r = midpoint_report(K, vec3(1, 2, 2) / 3.0, 0.5);
    EXPECT_GT(r.residual, 1e-2);
}

TEST(Midpoints, Errors) {
    auto K = materialize(BodySpec::ball(3, 1), fib(500));
    EXPECT_THROW(midpoint_report(K, vec3(0, 0, 1), 1.5), DomainError);
    EXPECT_THROW(midpoint_report(K, vec3(0, 0, 2), 0.5), DomainError);
    auto S = low_spike(fib(20000));
    EXPECT_THROW(midpoint_report(S, vec3(1, 0, 0), 0.45), GeometryError);
}

TEST(Detector, CatalogVerdicts) {
    auto g = fib(2000);
    auto dirs = sample_directions(3, 8, 5);
    auto e = ellipsoid_detector(materialize(BodySpec::ellipsoid({1, 2, 3}), g), dirs);
    auto c = ellipsoid_detector(materialize(BodySpec::cube(3, 1), g), dirs);
    auto p = ellipsoid_detector(materialize(BodySpec::perturbed_ball(3, 0.05, 3), g), dirs);
    EXPECT_TRUE(e.ellipsoid_consistent);
    EXPECT_FALSE(c.ellipsoid_consistent);
    EXPECT_FALSE(p.ellipsoid_consistent);
    EXPECT_EQ(e.residuals.size(), dirs.size());
    // separation by a factor of at least 5
    EXPECT_LT(5 * e.max_residual, std::min(c.max_residual, p.max_residual));
}

TEST(Stationarity, BallEllipsoidCube) {
    auto g = fib(1000);
    auto dirs = sample_directions(3, 4, 2);
    StationarityParams sp;
    sp.n_samples = 6000;

    auto B = materialize(BodySpec::ball(3, 1), g);
    auto rb = stationarity_report(B, std::pow(M_PI, 3), dirs, 0.02, sp);
    EXPECT_TRUE(rb.flagged.empty());
    for (const auto& d : rb.body) {
        ASSERT_TRUE(d.ok);
        EXPECT_LE(std::abs(d.dt_volume), rb.noise_floor_volume);
        EXPECT_LE(std::abs(d.dt_IvolK), rb.noise_floor_ivol);
    }

    auto E = materialize(BodySpec::ellipsoid({1, 2, 3}), g);
    auto re = stationarity_report(E, 6 * std::pow(M_PI, 3), dirs, 0.02, sp);
    EXPECT_TRUE(re.flagged.empty());

    auto C = materialize(BodySpec::cube(3, 1), g);
    double cc = fixed_point_residual(C, 2).c_best;
    auto rc = stationarity_report(C, cc, dirs, 0.02, sp);
    bool strong = false;
    for (const auto& d : rc.body) {
        EXPECT_LE(std::abs(d.dt_volume), rc.noise_floor_volume);
        EXPECT_GE(d.dt_IvolK, -rc.noise_floor_ivol);
        strong = strong || d.dt_IvolK > 5 * rc.noise_floor_ivol;
    }
    EXPECT_TRUE(strong);
    EXPECT_THROW(stationarity_report(C, cc, dirs, 0.5, sp), DomainError);
    EXPECT_THROW(stationarity_report(C, -1, dirs, 0.02, sp), DomainError);
}

TEST(Reports, JsonShapes) {
    auto K = materialize(BodySpec::ball(3, 1), fib(300));
    auto m = to_json(midpoint_report(K, vec3(0, 0, 1), 0.3, 5));
    EXPECT_TRUE(m.contains("residual"));
    auto d = to_json(ellipsoid_detector(K, sample_directions(3, 2, 1), 0.3, kEllipsoidThreshold, 5));
    EXPECT_EQ(d["verdict"], "ellipsoid-consistent");
    EXPECT_EQ(d["directions"].size(), 2u);
}

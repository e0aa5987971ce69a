#include <gtest/gtest.h>

#include "geotomo/errors.hpp"
#include "geotomo/interval_flow.hpp"
#include "test_support.hpp"

using namespace geotomo;
using geotomo::testing::march;
using geotomo::testing::random_superset;
using geotomo::testing::random_union;

namespace {

IntervalUnion U(const std::string& s) { return parse_intervals(s); }

void expect_union_near(const IntervalUnion& a, const IntervalUnion& b, double tol) {
    ASSERT_EQ(a.size(), b.size()) << format_intervals(a) << " vs " << format_intervals(b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a.intervals()[i].first, b.intervals()[i].first, tol);
        EXPECT_NEAR(a.intervals()[i].second, b.intervals()[i].second, tol);
    }
}

}  // namespace

TEST(IntervalUnion, RejectsBadInput) {
    EXPECT_THROW(IntervalUnion({{1, 1}}), DomainError);
    EXPECT_THROW(IntervalUnion({{0, 2}, {1, 3}}), DomainError);
    EXPECT_THROW(IntervalUnion({{0, 1}, {1, 3}}), DomainError);  // touching is not disjoint
    EXPECT_THROW(IntervalUnion(std::vector<IntervalUnion::Interval>{}), DomainError);
}

TEST(IntervalUnion, MergedFusesOverlaps) {
    auto J = IntervalUnion::merged({{3, 4}, {0, 1}, {0.5, 2}, {5, 5}});
    EXPECT_EQ(format_intervals(J), format_intervals(U("0,2;3,4")));
    EXPECT_DOUBLE_EQ(J.length(), 3.0);
}

TEST(IntervalUnion, TextRoundTrip) {
    auto J = U("-1.5,0.25;2,3.75");
    EXPECT_EQ(parse_intervals(format_intervals(J)), J);
    EXPECT_THROW(parse_intervals("1;2"), DomainError);
}

TEST(Flow, SingleIntervalMovesLinearly) {
    expect_union_near(flow(U("2,4"), 0.5), U("0.5,2.5"), 1e-14);
}

TEST(Flow, SymmetricIntervalIsFixed) {
    for (double t : {0.0, 0.3, 1.0}) expect_union_near(flow(U("-1,1"), t), U("-1,1"), 0);
}

TEST(Flow, TwoPieceCollision) {
    auto J = U("1,2;3,5");
    auto tr = flow_trace(J);
    ASSERT_EQ(tr.collision_times.size(), 1u);
    EXPECT_NEAR(tr.collision_times[0], 0.4, 1e-14);
    expect_union_near(flow(J, 0.4), U("0.4,3.4"), 1e-12);
    expect_union_near(flow(J, 1.0), U("-1.5,1.5"), 1e-12);
}

TEST(Flow, SimultaneousCollisionsAreOneEvent) {
    auto tr = flow_trace(U("-5,-4;-1,1;4,5"));
    ASSERT_EQ(tr.collision_times.size(), 1u);
    EXPECT_NEAR(tr.collision_times[0], 2.0 / 3.0, 1e-14);
    EXPECT_EQ(tr.snapshots[1].size(), 1u);
}

TEST(Flow, TraceCountsDecrease) {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        auto J = random_union(rng);
        auto tr = flow_trace(J);
        EXPECT_LE(tr.collision_times.size() + 1, J.size());
        for (std::size_t k = 1; k + 1 < tr.snapshots.size(); ++k)
            EXPECT_LT(tr.snapshots[k].size(), tr.snapshots[k - 1].size());
        for (std::size_t k = 1; k < tr.collision_times.size(); ++k)
            EXPECT_GT(tr.collision_times[k], tr.collision_times[k - 1]);
    }
}

TEST(Flow, RejectsTimeOutsideUnitInterval) {
    EXPECT_THROW(flow(U("0,1"), -0.1), DomainError);
    EXPECT_THROW(flow(U("0,1"), 1.1), DomainError);
}

TEST(Flow, MatchesTimeMarching) {
    Rng rng(5);
    std::vector<IntervalUnion> cases{U("1,2;3,5"), U("-5,-4;-1,1;4,5"), U("-3,-2.5;0.5,1;1.5,4")};
    for (int i = 0; i < 4; ++i) cases.push_back(random_union(rng, 4));
    for (const auto& J : cases) {
        for (double t : {0.25, 0.5, 0.9}) {
            auto exact = flow(J, t), marched = march(J, t);
            // fusion in the marcher lags by up to one step
            EXPECT_LT(hausdorff(exact, marched), 1e-3) << format_intervals(J) << " t=" << t;
            EXPECT_NEAR(exact.length(), J.length(), 1e-12 * J.length());
        }
    }
}

TEST(Flow, EndpointIdentities) {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        auto J = random_union(rng);
        EXPECT_EQ(flow(J, 0), J);
        auto one = flow(J, 1);
        ASSERT_EQ(one.size(), 1u);
        EXPECT_NEAR(one.lo(), -J.length() / 2, 1e-12 * (1 + J.length()));
        EXPECT_NEAR(one.hi(), J.length() / 2, 1e-12 * (1 + J.length()));
    }
}

TEST(FlowProperty, VolumeConservation) {
    Rng rng(101);
    for (int i = 0; i < 2000; ++i) {
        auto J = random_union(rng);
        double t = rng.uniform();
        EXPECT_NEAR(flow(J, t).length(), J.length(), 1e-12 * J.length());
    }
}

TEST(FlowProperty, Monotonicity) {
    Rng rng(102);
    for (int i = 0; i < 300; ++i) {
        auto A = random_union(rng);
        auto B = random_superset(A, rng);
        ASSERT_TRUE(is_subset(A, B));
        for (int k = 0; k < 10; ++k) {
            double t = rng.uniform();
            EXPECT_TRUE(is_subset(flow(A, t), flow(B, t), 1e-10))
                << format_intervals(A) << " | " << format_intervals(B) << " t=" << t;
        }
    }
}

TEST(FlowProperty, HausdorffStability) {
    Rng rng(103);
    for (int i = 0; i < 1000; ++i) {
        auto A = random_union(rng), B = random_union(rng);
        double eps = hausdorff(A, B);
        double m = static_cast<double>(std::max(A.size(), B.size()));
        double t = rng.uniform();
        EXPECT_LE(hausdorff(flow(A, t), flow(B, t)), 2 * m * eps + 1e-10);
    }
}

TEST(FlowProperty, TimeLipschitz) {
    Rng rng(104);
    for (int i = 0; i < 2000; ++i) {
        auto J = random_union(rng);
        double t = rng.uniform();
        EXPECT_LE(hausdorff(flow(J, t), J), J.max_center() * t + 1e-10);
    }
}

TEST(FlowProperty, Semigroup) {
    Rng rng(105);
    for (int i = 0; i < 2000; ++i) {
        auto J = random_union(rng);
        double tau = rng.uniform(), t = tau + (1 - tau) * rng.uniform();
        auto two = flow(flow(J, tau), tau < 1 ? (t - tau) / (1 - tau) : 0);
        EXPECT_LE(hausdorff(two, flow(J, t)), 1e-10);
    }
}

TEST(FlowProperty, SumRule) {
    Rng rng(106);
    for (int i = 0; i < 1000; ++i) {
        auto J = random_union(rng);
        double a = 0.1 + 2 * rng.uniform(), b = 2 * rng.uniform(), t = rng.uniform();
        auto lhs = minkowski_interval(flow(J, t), a, b);
        auto rhs = flow(minkowski_interval(J, a, b), t);
        EXPECT_TRUE(is_subset(lhs, rhs, 1e-10));
    }
}

TEST(Hausdorff, Examples) {
    EXPECT_EQ(hausdorff(U("0,1;2,3"), U("0,1;2,3")), 0);
    EXPECT_DOUBLE_EQ(hausdorff(U("0,1"), U("0,2")), 1);
    EXPECT_DOUBLE_EQ(hausdorff(U("0,1;3,4"), U("0,4")), 1);
}

TEST(Hausdorff, MatchesDenseSampling) {
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        auto A = random_union(rng, 3), B = random_union(rng, 3);
        // sup over dense samples of each set of the distance to the other
        double d = 0;
        for (const auto* P : {&A, &B}) {
            const auto* Q = P == &A ? &B : &A;
            for (auto [a, b] : P->intervals())
                for (int k = 0; k <= 4000; ++k) d = std::max(d, Q->distance(a + (b - a) * k / 4000.0));
        }
        double h = hausdorff(A, B);
        EXPECT_GE(h, d - 1e-12);
        EXPECT_LE(h, d + 1e-3);
        EXPECT_DOUBLE_EQ(h, hausdorff(B, A));
    }
}

TEST(Minkowski, Examples) {
    EXPECT_EQ(minkowski_interval(U("1,2;3,4"), 1, 0), U("1,2;3,4"));
    expect_union_near(minkowski_interval(U("1,2;3,4"), 1, 0.6), U("0.4,4.6"), 1e-15);
    expect_union_near(minkowski_interval(U("1,2"), 2, 0), U("2,4"), 0);
    EXPECT_THROW(minkowski_interval(U("1,2"), 0, 0), DomainError);
}

TEST(Subset, Basics) {
    EXPECT_TRUE(is_subset(U("0,1"), U("-1,2")));
    EXPECT_FALSE(is_subset(U("0,3"), U("0,1;2,3")));
    EXPECT_TRUE(is_subset(U("0,1.0000000001"), U("0,1"), 1e-9));
}

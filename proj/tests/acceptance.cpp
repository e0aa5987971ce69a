// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "geotomo/determinant_geometry.hpp"
#include "geotomo/diagnostics.hpp"
#include "geotomo/interval_flow.hpp"
#include "geotomo/parallel.hpp"
#include "geotomo/radon.hpp"
#include "geotomo/steiner.hpp"
#include "geotomo/volume_functionals.hpp"
#include "test_support.hpp"

using namespace geotomo;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string f(const char* fmt, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, fmt, a);
    return buf;
}

SphereGridPtr fib(int N) { return build_grid(3, N, GridKind::Fibonacci); }

RadonParams circle(int res) {
    RadonParams p;
    p.circle_resolution = res;
    return p;
}

const double kBallIK = 4 * M_PI / 3 * std::pow(M_PI, 3);

Outcome ball_fixed_point() {
    auto r = fixed_point_residual(materialize(BodySpec::ball(3, 1), fib(4096)), 1, circle(512));
    double rel = std::abs(r.c_best / M_PI - 1);
    return {rel < 5e-3 && r.residual < 1e-2,
            "c_best " + f("%.6f", r.c_best) + " (rel err " + f("%.2e", rel) + "), residual " + f("%.2e", r.residual)};
}

Outcome ellipsoid_periodic() {
    auto r = fixed_point_residual(materialize(BodySpec::ellipsoid({1, 2, 3}), fib(4096)), 2, circle(512));
    double ref = 6 * std::pow(M_PI, 3), rel = std::abs(r.c_best / ref - 1);
    return {rel < 0.02 && r.residual < 0.02,
            "c_best " + f("%.3f", r.c_best) + " vs " + f("%.3f", ref) + " (rel " + f("%.2e", rel) + "), residual " +
                f("%.2e", r.residual)};
}

Outcome planar_degeneracy() {
    auto g = build_grid(2, 2048, GridKind::UniformAngle);
    Rng rng(2024);
    double worst = 0;
    for (int k = 0; k < 3; ++k) {
        auto K = geotomo::testing::random_planar_body(g, rng);
        auto I2 = iterate_I(K, 2, false).bodies[2];
        for (std::size_t i = 0; i < g->size(); ++i)
            worst = std::max(worst, std::abs(I2.rho()[i] / (4 * K.rho()[i]) - 1));
    }
    return {worst < 5e-3, "sup relative error " + f("%.2e", worst) + " over 3 bodies"};
}

Outcome volume_consistency() {
    auto g = fib(4096);
    const long n_i0 = 1000000, n_iu = 100000;
    auto dirs = sample_directions(3, 2, 17);
    bool ok = true;
    std::string detail;
    const char* names[] = {"ball", "cube", "ellipsoid"};
    int b = 0;
    for (auto spec : {BodySpec::ball(3, 1), BodySpec::cube(3, 1), BodySpec::ellipsoid({1, 2, 3})}) {
        auto K = materialize(spec, g);
        struct Est { std::string name; double v, se; };
        std::vector<Est> es;
        es.push_back({"quad", volume(intersection_body(K, circle(512))), 0.0});
        auto i0 = estimate_I0(K, n_i0, 100 + b);
        es.push_back({"I0", i0.value, i0.std_error});
        for (int d = 0; d < 2; ++d) {
            auto iu = estimate_Iu(K, dirs[d], n_iu, 200 + 10 * b + d);
            es.push_back({"Iu" + std::to_string(d + 1), iu.value, iu.std_error});
        }
        double worst = 0;
        for (std::size_t i = 0; i < es.size(); ++i)
            for (std::size_t j = i + 1; j < es.size(); ++j) {
                double z = std::abs(es[i].v - es[j].v) / std::hypot(es[i].se, es[j].se);
                worst = std::max(worst, z);
            }
        ok = ok && worst <= 3;
        detail += std::string(b ? "; " : "") + names[b] + ":";
        for (const auto& e : es) detail += " " + e.name + "=" + f("%.2f", e.v) + (e.se > 0 ? f("+-%.2f", e.se) : "");
        detail += " max|z|=" + f("%.2f", worst);
        if (b == 0) {
            for (const auto& e : es) {
                double rel = std::abs(e.v / kBallIK - 1);
                ok = ok && rel < 0.05;
            }
        }
        ++b;
    }
    return {ok, detail};
}

Outcome interval_flow_laws() {
    using geotomo::testing::random_superset;
    using geotomo::testing::random_union;
    const int N = 10000;
    int bad[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < N; ++i) {
        Rng rng(derive_seed(31337, i));
        auto J = random_union(rng);
        double t = rng.uniform();
        // volume
        if (std::abs(flow(J, t).length() - J.length()) > 1e-12 * J.length()) ++bad[0];
        // monotonicity
        auto S = random_superset(J, rng);
        if (!is_subset(flow(J, t), flow(S, t), 1e-10)) ++bad[1];
        // Hausdorff stability
        auto A = random_union(rng);
        double eps = hausdorff(J, A), m = static_cast<double>(std::max(J.size(), A.size()));
        if (hausdorff(flow(J, t), flow(A, t)) > 2 * m * eps + 1e-10) ++bad[2];
        // time-Lipschitz
        if (hausdorff(flow(J, t), J) > J.max_center() * t + 1e-10) ++bad[3];
        // semigroup
        double tau = rng.uniform() * t;
        if (hausdorff(flow(flow(J, tau), (t - tau) / (1 - tau)), flow(J, t)) > 1e-10) ++bad[4];
        // sum rule
        double a = 0.1 + 2 * rng.uniform(), bb = 2 * rng.uniform();
        if (!is_subset(minkowski_interval(flow(J, t), a, bb), flow(minkowski_interval(J, a, bb), t), 1e-10)) ++bad[5];
    }
    int total = 0;
    std::string d = "violations (volume, monotone, hausdorff, lipschitz, semigroup, sum):";
    for (int k = 0; k < 6; ++k) {
        total += bad[k];
        d += " " + std::to_string(bad[k]);
    }
    return {total == 0, d + " over " + std::to_string(N) + " cases each"};
}

Outcome steiner_flow() {
    auto g = fib(2000);
    auto dirs = sample_directions(3, 8, 23);
    std::vector<double> ts;
    for (int i = 0; i <= 10; ++i) ts.push_back(i / 10.0);
    SteinerParams p;
    p.radon = circle(180);
    bool ok = true;
    double worst_drift = 0, worst_drop = 0, worst_ell = 0;
    for (auto spec : {BodySpec::cube(3, 1), BodySpec::ellipsoid({1, 2, 3})}) {
        auto K = materialize(spec, g);
        bool ell = spec.kind == BodySpec::Kind::Ellipsoid;
        for (const auto& u : dirs) {
            auto r = flow_report(K, u, ts, p);
            for (double v : r.volumes) worst_drift = std::max(worst_drift, std::abs(v / r.reference_volume - 1));
            const auto& iv = r.intersection_body_volumes;
            // tolerance: twice the reconstruction discrepancy at t = 0 plus quadrature noise
            double tol = 2 * std::abs(iv[0] - r.reference_ivolume) + 2e-4 * r.reference_ivolume;
            for (std::size_t k = 1; k < iv.size(); ++k) {
                double drop = iv[k - 1] - iv[k];
                if (drop > tol) ok = false;
                worst_drop = std::max(worst_drop, drop / tol);
            }
            if (ell)
                for (double v : iv) worst_ell = std::max(worst_ell, std::abs(v / iv[0] - 1));
        }
    }
    ok = ok && worst_drift < 0.01 && worst_ell < 0.02;
    return {ok, "max volume drift " + f("%.2e", worst_drift) + ", max step drop / tolerance " + f("%.2f", worst_drop) +
                    ", ellipsoid |I| variation " + f("%.2e", worst_ell)};
}

Outcome busemann() {
    auto g = fib(4096);
    auto c = busemann_gap(materialize(BodySpec::cube(3, 1), g), circle(512));
    auto e = busemann_gap(materialize(BodySpec::ellipsoid({1, 2, 3}), g), circle(512));
    bool ok = c.relative_gap >= 5 * kBusemannTolerance && std::abs(e.relative_gap) < 0.02;
    return {ok, "cube relative gap " + f("%.4f", c.relative_gap) + " (tolerance " + f("%.0e", kBusemannTolerance) +
                    "), ellipsoid relative gap " + f("%.2e", e.relative_gap)};
}

Outcome radon_spectrum() {
    auto g = fib(4096);
    auto p = circle(512);
    double worst = 0;
    std::vector<double> lx, ly;
    for (int m = 0; m <= 12; ++m) {
        double q = radon_eigenvalue3(g, m, p);
        worst = std::max(worst, std::abs(q - radon_multiplier3(m)));
        if (m >= 4 && m % 2 == 0) {
            lx.push_back(std::log(m));
            ly.push_back(std::log(std::abs(q)));
        }
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= lx.size(), my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += std::pow(lx[i] - mx, 2);
    double slope = sxy / sxx;
    bool ok = worst < 1e-3 && std::abs(slope / -0.5 - 1) <= 0.2;
    return {ok, "max eigenvalue error " + f("%.2e", worst) + ", decay exponent " + f("%.3f", slope) + " (target -0.5)"};
}

Outcome classifier() {
    auto corpus = classifier_corpus({2, 3, 4}, 10000, 99);
    int wrong_deriv = 0, facet_mismatch = 0, facet_checked = 0;
    for (const auto& k : corpus) {
        auto v = classify_equality(k.R, k.theta);
        double f1 = box_section_volume(Box{Vec::Zero(k.R.c.size()), k.R.l}, k.theta, 0);
        bool big = std::abs(v.derivative_estimate) > 1e-3 * f1;
        if (big != (v.tag == EqualityTag::Violated)) ++wrong_deriv;
        if (v.tag != EqualityTag::NoSection) {
            ++facet_checked;
            if (facet_criterion(k.R, k.theta) != facet_criterion_brute_force(k.R, k.theta)) ++facet_mismatch;
        }
    }
    return {wrong_deriv == 0 && facet_mismatch == 0,
            std::to_string(wrong_deriv) + " verdict/derivative disagreements in 10000 cases, " +
                std::to_string(facet_mismatch) + " facet mismatches in " + std::to_string(facet_checked)};
}

Outcome detector() {
    auto g = fib(4096);
    auto dirs = sample_directions(3, 16, 41);
    auto e = ellipsoid_detector(materialize(BodySpec::ellipsoid({1, 2, 3}), g), dirs);
    auto c = ellipsoid_detector(materialize(BodySpec::cube(3, 1), g), dirs);
    auto p = ellipsoid_detector(materialize(BodySpec::perturbed_ball(3, 0.05, 3), g), dirs);
    bool ok = e.max_residual < 1e-3 && c.max_residual > 1e-2 && p.max_residual > 1e-2;
    return {ok, "residual / scale: ellipsoid " + f("%.2e", e.max_residual) + ", cube " + f("%.3f", c.max_residual) +
                    ", perturbed ball " + f("%.3f", p.max_residual)};
}

Outcome contraction() {
    auto K = materialize(BodySpec::perturbed_ball(3, 0.05, 2), fib(4096));
    auto it = iterate_I(K, 6, true, circle(512));
    bool dec = true;
    for (std::size_t k = 1; k < it.eccentricity.size(); ++k) dec = dec && it.eccentricity[k] < it.eccentricity[k - 1];
    double ratio = it.eccentricity.back() / it.eccentricity.front();
    return {dec && ratio < 0.2, std::string("strictly decreasing: ") + (dec ? "yes" : "no") + ", eccentricity " +
                                    f("%.5f", it.eccentricity.front()) + " -> " + f("%.5f", it.eccentricity.back()) +
                                    " (ratio " + f("%.3f", ratio) + ", need < 0.2)"};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> all{
        {1, "ball fixed point", 10, ball_fixed_point},
        {2, "ellipsoid periodic point", 60, ellipsoid_periodic},
        {3, "planar I^2 K = 4K", 5, planar_degeneracy},
        {4, "volume formula consistency", 600, volume_consistency},
        {5, "interval flow laws", 30, interval_flow_laws},
        {6, "Steiner flow conservation and monotonicity", 600, steiner_flow},
        {7, "Busemann inequality", 120, busemann},
        {8, "Radon spectrum", 30, radon_spectrum},
        {9, "rectangle classifier soundness", 120, classifier},
        {10, "ellipsoid detector separation", 300, detector},
        {11, "iteration contraction", 120, contraction},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
    int failed = 0;
    for (const auto& c : all) {
        if (!pick.empty() && !pick.count(c.id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = dt <= c.budget_s;
        bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("criterion %2d %s: %s | %s | %.1f s (budget %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), dt, c.budget_s, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failed);
    return failed ? 1 : 0;
}

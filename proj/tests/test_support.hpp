#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "geotomo/interval_flow.hpp"
#include "geotomo/parallel.hpp"
#include "geotomo/star_body.hpp"

namespace geotomo::testing {

// Up to max_pieces disjoint intervals with random gaps, centered somewhere in [-6, 6].
inline IntervalUnion random_union(Rng& rng, int max_pieces = 6) {
    int k = 1 + static_cast<int>(rng.uniform() * max_pieces);
    std::vector<IntervalUnion::Interval> iv;
    double x = -6 + 4 * rng.uniform();
    for (int i = 0; i < k; ++i) {
        double len = 0.05 + 1.5 * rng.uniform();
        iv.push_back({x, x + len});
        x += len + 0.02 + 2 * rng.uniform();
    }
    return IntervalUnion(iv);
}

// A union containing J: every interval widened and some extra pieces thrown in.
inline IntervalUnion random_superset(const IntervalUnion& J, Rng& rng) {
    std::vector<IntervalUnion::Interval> iv;
    for (auto [a, b] : J.intervals()) iv.push_back({a - 0.3 * rng.uniform(), b + 0.3 * rng.uniform()});
    int extra = static_cast<int>(rng.uniform() * 3);
    for (int i = 0; i < extra; ++i) {
        double a = -8 + 16 * rng.uniform();
        iv.push_back({a, a + 0.1 + rng.uniform()});
    }
    return IntervalUnion::merged(iv);
}

// Explicit time-marching of the flow: every center obeys dc/dt = -c / (1 - t),
// and pieces that overlap are fused with the length-weighted center.
inline IntervalUnion march(const IntervalUnion& J, double t_end, double dt = 1e-5) {
    struct P { double c, l; };
    std::vector<P> ps;
    for (auto [a, b] : J.intervals()) ps.push_back({0.5 * (a + b), 0.5 * (b - a)});
    auto fuse = [&] {
        for (bool again = true; again;) {
            again = false;
            for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
                if (ps[i + 1].c - ps[i].c <= ps[i].l + ps[i + 1].l) {
                    double L = ps[i].l + ps[i + 1].l;
                    ps[i].c = (ps[i].c * ps[i].l + ps[i + 1].c * ps[i + 1].l) / L;
                    ps[i].l = L;
                    ps.erase(ps.begin() + i + 1);
                    again = true;
                    break;
                }
            }
        }
    };
    double t = 0;
    while (t < t_end - 1e-15) {
        double h = std::min(dt, t_end - t);
        for (auto& p : ps) p.c -= h * p.c / (1 - t);
        t += h;
        fuse();
    }
    std::vector<IntervalUnion::Interval> iv;
    for (auto& p : ps) iv.push_back({p.c - p.l, p.c + p.l});
    return IntervalUnion(iv);
}

// Origin-symmetric planar body with a few even Fourier modes.
inline StarBody random_planar_body(const SphereGridPtr& g, Rng& rng, double amp = 0.06) {
    std::vector<double> a(4), b(4);
    for (int k = 0; k < 4; ++k) {
        a[k] = amp * rng.normal();
        b[k] = amp * rng.normal();
    }
    std::vector<double> rho(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
        double phi = std::atan2(g->node(i)[1], g->node(i)[0]);
        double r = 1;
        for (int k = 0; k < 4; ++k) r += a[k] * std::cos(2 * (k + 1) * phi) + b[k] * std::sin(2 * (k + 1) * phi);
        rho[i] = std::max(r, 0.2);
    }
    return StarBody(g, rho);
}

inline Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

inline Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

}  // namespace geotomo::testing

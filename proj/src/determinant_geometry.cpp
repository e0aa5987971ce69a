#include "geotomo/determinant_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "geotomo/errors.hpp"
#include "geotomo/parallel.hpp"

namespace geotomo {

BoxUnion box_product(const std::vector<IntervalUnion>& fibers) {
    const int n = static_cast<int>(fibers.size());
    BoxUnion out;
    std::vector<std::size_t> idx(n, 0);
    for (const auto& f : fibers)
        if (f.empty()) return out;
    while (true) {
        Box b{Vec(n), Vec(n)};
        for (int i = 0; i < n; ++i) {
            auto [lo, hi] = fibers[i].intervals()[idx[i]];
            b.c[i] = 0.5 * (lo + hi);
            b.l[i] = 0.5 * (hi - lo);
        }
        out.boxes.push_back(std::move(b));
        int k = 0;
        while (k < n && ++idx[k] == fibers[k].size()) idx[k++] = 0;
        if (k == n) break;
    }
    return out;
}

double parallelotope_volume(const std::vector<Vec>& xs) {
    if (xs.empty()) return 1.0;
    const int m = static_cast<int>(xs.size());
    const int n = static_cast<int>(xs[0].size());
    if (m > n) return 0.0;
    Mat G(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) G(i, j) = xs[i].dot(xs[j]);
    double d = G.determinant();
    return d > 0 ? std::sqrt(d) : 0.0;
}

Dependency dependency_direction_coords(const std::vector<Vec>& coords) {
    const int n = static_cast<int>(coords.size());
    if (n < 2) throw DomainError("dependency_direction: need at least two points");
    Mat Y(n - 1, n);
    double scale = 0;
    for (int j = 0; j < n; ++j) {
        if (coords[j].size() != n - 1) throw DomainError("dependency_direction: coordinates must have length n-1");
        Y.col(j) = coords[j];
        scale = std::max(scale, coords[j].norm());
    }
    if (!(scale > 0)) throw DegenerateSample("dependency_direction: all points at the origin");
    // generalized cross product of the rows: theta_j = (-1)^j det(Y without column j)
    Vec th(n);
    for (int j = 0; j < n; ++j) {
        Mat M(n - 1, n - 1);
        for (int k = 0, col = 0; k < n; ++k) {
            if (k == j) continue;
            M.col(col++) = Y.col(k);
        }
        double det = n - 1 == 0 ? 1.0 : M.determinant();
        th[j] = (j % 2 ? -det : det);
    }
    double delta = th.norm();
    // smallest singular value of Y relative to scale
    Eigen::JacobiSVD<Mat> svd(Y);
    double smin = svd.singularValues()[n - 2];
    if (!(smin > 1e-10 * scale) || !(delta > 0))
        throw DegenerateSample("dependency_direction: near-dependent configuration");
    th /= delta;
    for (int j = 0; j < n; ++j) {
        if (std::abs(th[j]) > 1e-14) {
            if (th[j] < 0) th = -th;
            break;
        }
    }
    return {th, delta};
}

Dependency dependency_direction(const std::vector<Vec>& ys, const Vec& u) {
    const int n = static_cast<int>(u.size());
    if (static_cast<int>(ys.size()) != n) throw DomainError("dependency_direction: need n points");
    Mat B = complement_basis(u / u.norm());
    std::vector<Vec> coords;
    for (const auto& y : ys) coords.push_back(B.transpose() * y);
    return dependency_direction_coords(coords);
}

namespace {

using ld = long double;

// (m-1)-volume of prod[0, 2 l_i] cap {sum a_i x_i = s}, all a_i > 0, times |a| / |a| factor
// handled by the caller.
ld slab_density(const std::vector<ld>& a, const std::vector<ld>& l, ld s) {
    const int m = static_cast<int>(a.size());
    ld total = 0;
    for (int i = 0; i < m; ++i) total += 2 * a[i] * l[i];
    if (s < 0 || s > total) return 0;
    s = std::min(s, total - s);  // section profile is symmetric
    if (m == 1) return 1;
    ld sum = 0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        ld x = s;
        int bits = 0;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) {
                x -= 2 * a[i] * l[i];
                ++bits;
            }
        if (x <= 0) continue;
        ld p = 1;
        for (int k = 0; k < m - 1; ++k) p *= x;
        sum += (bits % 2 ? -p : p);
    }
    ld den = 1;
    for (int k = 2; k <= m - 1; ++k) den *= k;
    for (int i = 0; i < m; ++i) den *= a[i];
    return std::max<ld>(0, sum / den);
}

}  // namespace

double box_section_volume(const Box& R, const Vec& theta, double offset) {
    const int n = static_cast<int>(theta.size());
    ld H = 0;
    for (int i = 0; i < n; ++i) H += std::abs(static_cast<ld>(theta[i])) * R.l[i];
    if (!(H > 0)) return 0.0;
    std::vector<ld> a, l;
    ld factor = 1, norm2 = 0, shift = 0;
    for (int i = 0; i < n; ++i) {
        ld w = std::abs(static_cast<ld>(theta[i])) * R.l[i];
        if (w <= 1e-9L * H) {
            // hyperplane is (numerically) parallel to axis i: cylinder factor
            factor *= 2 * static_cast<ld>(R.l[i]);
            shift += static_cast<ld>(theta[i]) * R.c[i];
            continue;
        }
        a.push_back(std::abs(static_cast<ld>(theta[i])));
        l.push_back(R.l[i]);
        norm2 += static_cast<ld>(theta[i]) * theta[i];
        shift += static_cast<ld>(theta[i]) * R.c[i] - w;  // min of theta_i x_i over the edge
    }
    ld s = static_cast<ld>(offset) - shift;
    ld dens = slab_density(a, l, s);
    return static_cast<double>(factor * std::sqrt(norm2) * dens);
}

double box_union_section_volume(const BoxUnion& RU, const Vec& theta) {
    double s = 0;
    for (const auto& b : RU.boxes) s += box_section_volume(b, theta, 0.0);
    return s;
}

bool facet_criterion(const Box& R, const Vec& theta) {
    double b = theta.dot(R.c);
    double H = 0, wmax = 0;
    for (int i = 0; i < theta.size(); ++i) {
        double w = std::abs(theta[i]) * R.l[i];
        H += w;
        wmax = std::max(wmax, w);
    }
    if (b - H > 0 || b + H < 0) throw DomainError("facet_criterion: theta-perp misses the box");
    return std::abs(b) + H >= 2 * wmax;
}

bool facet_criterion_brute_force(const Box& R, const Vec& theta) {
    const int n = static_cast<int>(theta.size());
    for (int i = 0; i < n; ++i) {
        double rest_c = 0, rest_w = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            rest_c += theta[j] * R.c[j];
            rest_w += std::abs(theta[j]) * R.l[j];
        }
        bool met = false;
        for (double sgn : {-1.0, 1.0}) {
            double v = theta[i] * (R.c[i] + sgn * R.l[i]) + rest_c;
            if (v - rest_w <= 0 && 0 <= v + rest_w) met = true;
        }
        if (!met) return false;
    }
    return true;
}

std::string to_string(EqualityTag t) {
    switch (t) {
        case EqualityTag::NoSection: return "no-section";
        case EqualityTag::Centered: return "centered";
        case EqualityTag::NMinus1Pairs: return "n-minus-1-pairs";
        case EqualityTag::Violated: return "violated";
    }
    return "?";
}

std::vector<double> recentering_profile(const Box& R, const Vec& theta, const std::vector<double>& t_samples) {
    std::vector<double> f;
    for (double t : t_samples) {
        Box Rt{R.c * (1.0 - t), R.l};
        f.push_back(box_section_volume(Rt, theta, 0.0));
    }
    return f;
}

double recentering_derivative(const Box& R, const Vec& theta, double h) {
    auto f = recentering_profile(R, theta, {0.0, h});
    return (f[1] - f[0]) / h;
}

EqualityVerdict classify_equality(const Box& R, const Vec& theta, double tol) {
    const int n = static_cast<int>(theta.size());
    if (theta.cwiseAbs().maxCoeff() > 1.0 - 1e-12)
        throw DomainError("classify_equality: axis-aligned direction is not supported");
    double tol_abs = tol * (R.c.norm() + R.l.norm());
    double b = theta.dot(R.c);
    double H = 0, wmax = 0;
    int active = 0;
    for (int i = 0; i < n; ++i) {
        double w = std::abs(theta[i]) * R.l[i];
        H += w;
        wmax = std::max(wmax, w);
        if (w > tol_abs) ++active;
    }
    double D = 2 * wmax - H;
    double ab = std::abs(b);
    EqualityTag tag;
    if (ab > H + tol_abs) {
        tag = EqualityTag::NoSection;
    } else if (ab >= H - tol_abs) {
        // touching: the contact face has dimension n - active
        tag = active >= 3 ? EqualityTag::NoSection : EqualityTag::Violated;
    } else if (ab <= tol_abs) {
        tag = EqualityTag::Centered;
    } else if (ab <= D + tol_abs) {
        tag = EqualityTag::NMinus1Pairs;
    } else {
        tag = EqualityTag::Violated;
    }
    return {tag, recentering_derivative(R, theta)};
}

std::vector<BoxCase> classifier_corpus(const std::vector<int>& dims, int count, std::uint64_t seed) {
    if (dims.empty()) throw DomainError("classifier_corpus: no dimensions");
    for (int d : dims)
        if (d < 2 || d > 8) throw DomainError("classifier_corpus: dimension out of range");
    std::vector<BoxCase> out;
    out.reserve(count);
    constexpr EqualityTag order[] = {EqualityTag::NoSection, EqualityTag::Centered, EqualityTag::NMinus1Pairs,
                                     EqualityTag::Violated};
    for (int i = 0; i < count; ++i) {
        const int n = dims[i % dims.size()];
        const EqualityTag tag = order[(i / dims.size()) % 4];
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        Vec theta(n);
        do {
            for (int k = 0; k < n; ++k) theta[k] = rng.normal();
            theta /= theta.norm();
        } while (theta.cwiseAbs().minCoeff() < 0.05);
        Vec l(n);
        for (int k = 0; k < n; ++k) l[k] = 0.2 + 1.8 * rng.uniform();
        int kmax = 0;
        for (int k = 1; k < n; ++k)
            if (std::abs(theta[k]) * l[k] > std::abs(theta[kmax]) * l[kmax]) kmax = k;
        if (tag == EqualityTag::NMinus1Pairs) {
            // make one weight dominate so that D > 0 with room on both sides
            double rest = 0;
            for (int k = 0; k < n; ++k)
                if (k != kmax) rest += std::abs(theta[k]) * l[k];
            l[kmax] = rest * (1.5 + rng.uniform()) / std::abs(theta[kmax]);
        }
        double H = 0, wmax = 0;
        for (int k = 0; k < n; ++k) {
            H += std::abs(theta[k]) * l[k];
            wmax = std::max(wmax, std::abs(theta[k]) * l[k]);
        }
        const double D = 2 * wmax - H;
        const double sgn = rng.uniform() < 0.5 ? -1.0 : 1.0;
        double b = 0;
        switch (tag) {
            case EqualityTag::NoSection: b = H * (1.1 + 0.5 * rng.uniform()); break;
            case EqualityTag::Centered: b = 0; break;
            case EqualityTag::NMinus1Pairs: b = D * (0.1 + 0.8 * rng.uniform()); break;
            case EqualityTag::Violated: {
                double lo = std::max(D, 0.0);
                b = lo + (H - lo) * (0.1 + 0.8 * rng.uniform());
                break;
            }
        }
        b *= sgn;
        Vec c(n);
        for (int k = 0; k < n; ++k) c[k] = rng.normal();
        c += (b - theta.dot(c)) * theta;
        out.push_back({Box{c, l}, theta, tag});
    }
    return out;
}

}  // namespace geotomo

#include "geotomo/interval_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "geotomo/errors.hpp"

namespace geotomo {

IntervalUnion::IntervalUnion(std::vector<Interval> iv) : iv_(std::move(iv)) {
    for (std::size_t i = 0; i < iv_.size(); ++i) {
        auto [a, b] = iv_[i];
        if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
            throw DomainError("interval union: each interval needs a < b");
        if (i + 1 < iv_.size() && !(b < iv_[i + 1].first))
            throw DomainError("interval union: intervals must be sorted and disjoint");
    }
    if (iv_.empty()) throw DomainError("interval union: empty");
}

IntervalUnion IntervalUnion::merged(std::vector<Interval> iv, double merge_gap) {
    std::sort(iv.begin(), iv.end());
    IntervalUnion out;
    for (auto [a, b] : iv) {
        if (!(a < b)) continue;
        if (!out.iv_.empty() && a - out.iv_.back().second <= merge_gap)
            out.iv_.back().second = std::max(out.iv_.back().second, b);
        else
            out.iv_.emplace_back(a, b);
    }
    return out;
}

double IntervalUnion::length() const {
    double s = 0;
    for (auto [a, b] : iv_) s += b - a;
    return s;
}

bool IntervalUnion::contains(double s) const { return distance(s) == 0.0; }

double IntervalUnion::distance(double s) const {
    // first interval with b >= s
    auto it = std::lower_bound(iv_.begin(), iv_.end(), s,
                               [](const Interval& I, double v) { return I.second < v; });
    double d = std::numeric_limits<double>::infinity();
    if (it != iv_.end()) d = std::max(0.0, it->first - s);
    if (it != iv_.begin()) d = std::min(d, s - std::prev(it)->second);
    return d;
}

double IntervalUnion::max_center() const {
    double r = 0;
    for (auto [a, b] : iv_) r = std::max(r, std::abs(0.5 * (a + b)));
    return r;
}

namespace {

// Interval as center / half-length: merging adds half-lengths, so total length is
// carried exactly through every collision.
struct Piece {
    double c, l;
};

std::vector<Piece> to_pieces(const IntervalUnion& J) {
    std::vector<Piece> p;
    for (auto [a, b] : J.intervals()) p.push_back({0.5 * (a + b), 0.5 * (b - a)});
    return p;
}

IntervalUnion from_pieces(const std::vector<Piece>& p) {
    std::vector<IntervalUnion::Interval> iv;
    for (const auto& q : p) iv.emplace_back(q.c - q.l, q.c + q.l);
    // rounding can make freshly merged neighbours touch; merge defensively
    return IntervalUnion::merged(std::move(iv));
}

// Within an epoch centers scale by (1 - s); local time of the first touch, 2 if none.
double next_event(const std::vector<Piece>& p) {
    double best = 2.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        double dc = p[i + 1].c - p[i].c;
        double s = 1.0 - (p[i].l + p[i + 1].l) / dc;
        best = std::min(best, std::max(0.0, s));
    }
    return best;
}

std::vector<Piece> advance_pieces(const std::vector<Piece>& p, double s) {
    std::vector<Piece> q(p);
    for (auto& x : q) x.c *= (1.0 - s);
    return q;
}

std::vector<Piece> merge_touching(const std::vector<Piece>& q, double tol) {
    std::vector<Piece> out;
    for (const auto& x : q) {
        if (!out.empty()) {
            Piece& y = out.back();
            double gap = (x.c - x.l) - (y.c + y.l);
            if (gap <= tol) {
                double l = y.l + x.l;
                double c = (y.c * y.l + x.c * x.l) / l;
                y = {c, l};
                continue;
            }
        }
        out.push_back(x);
    }
    return out;
}

struct Epoch {
    double tau;  // global start time
    std::vector<Piece> pieces;
};

std::vector<Epoch> epochs(const IntervalUnion& J) {
    std::vector<Epoch> ep;
    std::vector<Piece> p = to_pieces(J);
    double scale = std::max(1.0, std::max(std::abs(J.lo()), std::abs(J.hi())));
    double tol = 1e-12 * scale;
    double tau = 0.0;
    ep.push_back({tau, p});
    while (p.size() > 1) {
        double s = next_event(p);
        if (s >= 1.0) break;  // cannot happen for valid input, kept as a guard
        std::vector<Piece> q = merge_touching(advance_pieces(p, s), tol);
        tau = tau + s * (1.0 - tau);
        if (q.size() >= p.size()) break;
        p = std::move(q);
        ep.push_back({tau, p});
    }
    return ep;
}

}  // namespace

IntervalUnion flow(const IntervalUnion& J, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("flow: t must lie in [0, 1]");
    if (J.empty()) throw DomainError("flow: empty interval union");
    if (t == 0.0) return J;
    if (t == 1.0) return centered(J);
    auto ep = epochs(J);
    std::size_t k = 0;
    while (k + 1 < ep.size() && ep[k + 1].tau <= t) ++k;
    const Epoch& e = ep[k];
    double s = (t - e.tau) / (1.0 - e.tau);
    return from_pieces(advance_pieces(e.pieces, s));
}

FlowTrace flow_trace(const IntervalUnion& J) {
    FlowTrace tr;
    auto ep = epochs(J);
    for (const auto& e : ep) {
        if (e.tau > 0) tr.collision_times.push_back(e.tau);
        tr.snapshot_times.push_back(e.tau);
        tr.snapshots.push_back(from_pieces(e.pieces));
    }
    tr.snapshot_times.push_back(1.0);
    tr.snapshots.push_back(centered(J));
    return tr;
}

IntervalUnion centered(const IntervalUnion& J) {
    double h = 0.5 * J.length();
    return IntervalUnion({{-h, h}});
}

double hausdorff(const IntervalUnion& A, const IntervalUnion& B) {
    // sup over X of dist(., Y) is attained at an endpoint of X or at a gap midpoint of Y
    auto one_sided = [](const IntervalUnion& X, const IntervalUnion& Y) {
        double d = 0;
        for (auto [a, b] : X.intervals()) {
            d = std::max(d, Y.distance(a));
            d = std::max(d, Y.distance(b));
        }
        const auto& yi = Y.intervals();
        for (std::size_t i = 0; i + 1 < yi.size(); ++i) {
            double m = 0.5 * (yi[i].second + yi[i + 1].first);
            if (X.contains(m)) d = std::max(d, Y.distance(m));
        }
        return d;
    };
    return std::max(one_sided(A, B), one_sided(B, A));
}

IntervalUnion minkowski_interval(const IntervalUnion& J, double a, double b) {
    if (!(a >= 0) || !(b >= 0)) throw DomainError("minkowski_interval: a and b must be non-negative");
    if (a == 0 && b == 0) throw DomainError("minkowski_interval: result would be empty");
    if (a == 0) return IntervalUnion({{-b, b}});
    std::vector<IntervalUnion::Interval> iv;
    for (auto [x, y] : J.intervals()) iv.emplace_back(a * x - b, a * y + b);
    return IntervalUnion::merged(std::move(iv));
}

bool is_subset(const IntervalUnion& A, const IntervalUnion& B, double tol) {
    for (auto [a, b] : A.intervals()) {
        // [a, b] must sit inside one interval of B (up to tol)
        bool ok = false;
        for (auto [c, d] : B.intervals()) {
            if (c - tol <= a && b <= d + tol) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

std::string format_intervals(const IntervalUnion& J) {
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < J.size(); ++i) {
        if (i) out += ';';
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", J.intervals()[i].first, J.intervals()[i].second);
        out += buf;
    }
    return out;
}

IntervalUnion parse_intervals(const std::string& s) {
    std::vector<IntervalUnion::Interval> iv;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        auto comma = item.find(',');
        if (comma == std::string::npos) throw DomainError("parse_intervals: expected 'a,b' in '" + item + "'");
        try {
            iv.emplace_back(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DomainError("parse_intervals: bad number in '" + item + "'");
        }
    }
    return IntervalUnion(std::move(iv));
}

}  // namespace geotomo

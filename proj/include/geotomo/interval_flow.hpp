#pragma once

#include <string>
#include <utility>
#include <vector>

namespace geotomo {

/// Finite union of disjoint closed intervals of positive length, sorted.
class IntervalUnion {
public:
    using Interval = std::pair<double, double>;

    IntervalUnion() = default;
    // Validates the invariants; throws DomainError.
    explicit IntervalUnion(std::vector<Interval> iv);
    // Sorts and merges overlapping or touching input; drops zero-length pieces.
    static IntervalUnion merged(std::vector<Interval> iv, double merge_gap = 0.0);

    const std::vector<Interval>& intervals() const { return iv_; }
    std::size_t size() const { return iv_.size(); }
    bool empty() const { return iv_.empty(); }
    double length() const;
    double lo() const { return iv_.front().first; }
    double hi() const { return iv_.back().second; }
    bool contains(double s) const;
    // distance from s to the set (0 inside)
    double distance(double s) const;
    // max |c_i| over interval centers
    double max_center() const;

    bool operator==(const IntervalUnion&) const = default;

private:
    std::vector<Interval> iv_;
};

struct FlowTrace {
    std::vector<double> collision_times;
    std::vector<IntervalUnion> snapshots;  // t = 0, each collision time, t = 1
    std::vector<double> snapshot_times;
};

// S^t J by exact event simulation.
IntervalUnion flow(const IntervalUnion& J, double t);
FlowTrace flow_trace(const IntervalUnion& J);
// [-|J|/2, |J|/2]
IntervalUnion centered(const IntervalUnion& J);

double hausdorff(const IntervalUnion& A, const IntervalUnion& B);
// a J + [-b, b]
IntervalUnion minkowski_interval(const IntervalUnion& J, double a, double b);
// A subset of B, up to slack tol on the endpoints
bool is_subset(const IntervalUnion& A, const IntervalUnion& B, double tol = 0.0);

// "a1,b1;a2,b2"
std::string format_intervals(const IntervalUnion& J);
IntervalUnion parse_intervals(const std::string& s);

}  // namespace geotomo

#pragma once

#include <cstddef>
#include <vector>

#include "geotomo/vec.hpp"

namespace geotomo {

// Static kd-tree over points in R^n (exact nearest / k-nearest queries).
class KdTree {
public:
    KdTree(const std::vector<Vec>& pts, int dim);

    std::size_t nearest(const Vec& q) const;
    void k_nearest(const Vec& q, int k, std::vector<std::size_t>& idx, std::vector<double>& d2) const;

private:
    struct Node {
        int lo, hi;    // range in perm_
        int axis;      // -1 for leaf
        double split;
        int left, right;
    };

    int build(int lo, int hi);
    void search(int ni, const double* q, int k, std::vector<std::pair<double, int>>& heap) const;

    int dim_;
    std::vector<double> pts_;  // row-major, dim_ per point
    std::vector<int> perm_;
    std::vector<Node> nodes_;
};

}  // namespace geotomo

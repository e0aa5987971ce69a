#include "kdtree.hpp"

#include <algorithm>
#include <limits>

namespace geotomo {

namespace {
constexpr int kLeaf = 8;
}

KdTree::KdTree(const std::vector<Vec>& pts, int dim) : dim_(dim) {
    pts_.resize(pts.size() * dim);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int d = 0; d < dim; ++d) pts_[i * dim + d] = pts[i][d];
    perm_.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) perm_[i] = static_cast<int>(i);
    nodes_.reserve(2 * pts.size() / kLeaf + 2);
    build(0, static_cast<int>(pts.size()));
}

int KdTree::build(int lo, int hi) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({lo, hi, -1, 0.0, -1, -1});
    if (hi - lo <= kLeaf) return id;
    int axis = 0;
    double best = -1;
    for (int d = 0; d < dim_; ++d) {
        double mn = std::numeric_limits<double>::max(), mx = -mn;
        for (int i = lo; i < hi; ++i) {
            double v = pts_[perm_[i] * dim_ + d];
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        if (mx - mn > best) {
            best = mx - mn;
            axis = d;
        }
    }
    int mid = (lo + hi) / 2;
    std::nth_element(perm_.begin() + lo, perm_.begin() + mid, perm_.begin() + hi, [&](int a, int b) {
        return pts_[a * dim_ + axis] < pts_[b * dim_ + axis];
    });
    double split = pts_[perm_[mid] * dim_ + axis];
    int l = build(lo, mid);
    int r = build(mid, hi);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

void KdTree::search(int ni, const double* q, int k, std::vector<std::pair<double, int>>& heap) const {
    const Node& nd = nodes_[ni];
    if (nd.axis < 0) {
        for (int i = nd.lo; i < nd.hi; ++i) {
            const double* p = &pts_[perm_[i] * dim_];
            double d2 = 0;
            for (int d = 0; d < dim_; ++d) d2 += (p[d] - q[d]) * (p[d] - q[d]);
            if (static_cast<int>(heap.size()) < k) {
                heap.emplace_back(d2, perm_[i]);
                std::push_heap(heap.begin(), heap.end());
            } else if (d2 < heap.front().first ||
                       (d2 == heap.front().first && perm_[i] < heap.front().second)) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = {d2, perm_[i]};
                std::push_heap(heap.begin(), heap.end());
            }
        }
        return;
    }
    double diff = q[nd.axis] - nd.split;
    int first = diff < 0 ? nd.left : nd.right;
    int second = diff < 0 ? nd.right : nd.left;
    search(first, q, k, heap);
    if (static_cast<int>(heap.size()) < k || diff * diff <= heap.front().first) search(second, q, k, heap);
}

std::size_t KdTree::nearest(const Vec& q) const {
    std::vector<std::pair<double, int>> heap;
    heap.reserve(1);
    search(0, q.data(), 1, heap);
    return static_cast<std::size_t>(heap.front().second);
}

void KdTree::k_nearest(const Vec& q, int k, std::vector<std::size_t>& idx, std::vector<double>& d2) const {
    std::vector<std::pair<double, int>> heap;
    heap.reserve(k);
    search(0, q.data(), k, heap);
    std::sort_heap(heap.begin(), heap.end());
    idx.resize(heap.size());
    d2.resize(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) {
        idx[i] = heap[i].second;
        d2[i] = heap[i].first;
    }
}

}  // namespace geotomo

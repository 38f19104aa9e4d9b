#include "apthunt/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "apthunt/errors.hpp"

namespace apthunt::index {

double squared_distance(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = static_cast<double>(a[k]) - b[k];
        s += d * d;
    }
    return s;
}

KdTree::KdTree(std::vector<embedding::Vector> points) : points_(std::move(points)) {
    if (points_.empty()) throw InputError("KD-tree needs at least one point");
    dim_ = points_.front().size();
    for (const auto& p : points_)
        if (p.size() != dim_) throw InputError("KD-tree points must share one dimension");
    std::vector<std::size_t> ids(points_.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    nodes_.reserve(points_.size());
    root_ = build(ids, 0, ids.size());
}

int KdTree::build(std::vector<std::size_t>& ids, std::size_t lo, std::size_t hi) {
    if (lo >= hi) return -1;
    std::size_t axis = 0;
    float best_spread = -1.0f;
    for (std::size_t k = 0; k < dim_; ++k) {
        float mn = std::numeric_limits<float>::max(), mx = std::numeric_limits<float>::lowest();
        for (std::size_t i = lo; i < hi; ++i) {
            mn = std::min(mn, points_[ids[i]][k]);
            mx = std::max(mx, points_[ids[i]][k]);
        }
        if (mx - mn > best_spread) {
            best_spread = mx - mn;
            axis = k;
        }
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(ids.begin() + static_cast<std::ptrdiff_t>(lo), ids.begin() + static_cast<std::ptrdiff_t>(mid),
                     ids.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                         if (points_[a][axis] != points_[b][axis]) return points_[a][axis] < points_[b][axis];
                         return a < b;
                     });
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{ids[mid], axis, -1, -1});
    const int left = build(ids, lo, mid);
    const int right = build(ids, mid + 1, hi);
    nodes_[static_cast<std::size_t>(self)].left = left;
    nodes_[static_cast<std::size_t>(self)].right = right;
    return self;
}

void KdTree::nearest_rec(int node, std::span<const float> q, std::size_t& best, double& best_d2) const {
    if (node < 0) return;
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    const double d2 = squared_distance(q, points_[n.point]);
    if (d2 < best_d2 || (d2 == best_d2 && n.point < best)) {
        best_d2 = d2;
        best = n.point;
    }
    const double diff = static_cast<double>(q[n.axis]) - points_[n.point][n.axis];
    const int near = diff < 0 ? n.left : n.right;
    const int far = diff < 0 ? n.right : n.left;
    nearest_rec(near, q, best, best_d2);
    // <= keeps equal-distance points on the far side reachable for the tie rule
    if (diff * diff <= best_d2) nearest_rec(far, q, best, best_d2);
}

std::size_t KdTree::nearest(std::span<const float> query) const {
    if (query.size() != dim_) throw InputError("KD-tree query has wrong dimension");
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double best_d2 = std::numeric_limits<double>::infinity();
    nearest_rec(root_, query, best, best_d2);
    return best;
}

void KdTree::within_rec(int node, std::span<const float> q, double r2, std::vector<std::size_t>& out) const {
    if (node < 0) return;
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    if (squared_distance(q, points_[n.point]) <= r2) out.push_back(n.point);
    const double diff = static_cast<double>(q[n.axis]) - points_[n.point][n.axis];
    if (diff <= 0 || diff * diff <= r2) within_rec(n.left, q, r2, out);
    if (diff >= 0 || diff * diff <= r2) within_rec(n.right, q, r2, out);
}

std::vector<std::size_t> KdTree::within(std::span<const float> query, double radius) const {
    if (query.size() != dim_) throw InputError("KD-tree query has wrong dimension");
    std::vector<std::size_t> out;
    if (radius < 0) return out;
    within_rec(root_, query, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace apthunt::index

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "apthunt/embedding.hpp"

namespace apthunt::index {

// Balanced KD-tree (median splits on the widest dimension) over a fixed point
// set. Queries are exact under Euclidean distance.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::vector<embedding::Vector> points);

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const embedding::Vector& point(std::size_t i) const { return points_[i]; }

    // Index of the closest point; ties resolve to the lowest index.
    std::size_t nearest(std::span<const float> query) const;

    // Indices of every point with distance <= radius, ascending.
    std::vector<std::size_t> within(std::span<const float> query, double radius) const;

private:
    struct Node {
        std::size_t point = 0;  // index into points_
        std::size_t axis = 0;
        int left = -1;
        int right = -1;
    };

    int build(std::vector<std::size_t>& ids, std::size_t lo, std::size_t hi);
    void nearest_rec(int node, std::span<const float> q, std::size_t& best, double& best_d2) const;
    void within_rec(int node, std::span<const float> q, double r2, std::vector<std::size_t>& out) const;

    std::size_t dim_ = 0;
    std::vector<embedding::Vector> points_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

double squared_distance(std::span<const float> a, std::span<const float> b);

}  // namespace apthunt::index

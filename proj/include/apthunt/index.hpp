#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "apthunt/embedding.hpp"
#include "apthunt/kdtree.hpp"

namespace apthunt::index {

struct MeanShiftOptions {
    double convergence = 1e-4;
    int max_iterations = 300;
    // Seeds are picked by a leader pass (a point becomes a seed when no seed
    // lies within the bandwidth). Past this cap the remaining points are only
    // assigned, never used as seeds.
    std::size_t max_seeds = 2048;
};

struct MeanShiftResult {
    std::vector<embedding::Vector> centroids;
    std::vector<std::size_t> assignments;  // point -> centroid
};

// Flat-kernel mean shift. Modes closer than bandwidth/2 are merged (denser mode
// wins) and every point goes to its nearest surviving mode.
MeanShiftResult mean_shift(std::span<const embedding::Vector> points, double bandwidth,
                           const MeanShiftOptions& opts = {});

// Quantile of pairwise Euclidean distances over a deterministic sample of at
// most `sample` points. quantile 0.5 is the median heuristic.
double estimate_bandwidth(std::span<const embedding::Vector> points, double quantile = 0.5,
                          std::size_t sample = 1000);

// Distance between unit vectors at cosine theta_hit: sqrt(2 - 2 theta_hit).
double hit_radius(double theta_hit);

enum class BandwidthRule {
    hit_radius,      // clusters span items that would hit each other
    median_pairwise  // estimate_bandwidth(points, bandwidth_quantile)
};

enum class SearchMode {
    exact,           // every cluster whose ball could hold a hit is scanned
    nearest_cluster  // only the closest cluster, may miss borderline hits
};

struct IndexOptions {
    // <= 0 picks it by `rule`.
    double bandwidth = 0.0;
    BandwidthRule rule = BandwidthRule::hit_radius;
    double theta_hit = 0.75;
    double bandwidth_quantile = 0.5;
    MeanShiftOptions mean_shift;
};

using Hit = std::pair<std::size_t, double>;  // item id, cosine

// Two-stage cosine search: mean-shift clusters of L2-normalized vectors with a
// KD-tree over their centroids. Immutable once built.
class ClusterIndex {
public:
    ClusterIndex() = default;
    ClusterIndex(std::vector<embedding::Vector> vectors, const IndexOptions& opts = {});

    std::size_t size() const noexcept { return vectors_.size(); }
    std::size_t cluster_count() const noexcept { return centroids_.size(); }
    double bandwidth() const noexcept { return bandwidth_; }
    const std::vector<embedding::Vector>& centroids() const noexcept { return centroids_; }
    // Cluster of item i, or npos for zero vectors (they never join a cluster).
    std::size_t assignment(std::size_t i) const { return assignments_[i]; }
    const std::vector<std::size_t>& members(std::size_t cluster) const { return members_[cluster]; }
    const embedding::Vector& vector(std::size_t i) const { return vectors_[i]; }

    // Items with cosine(query, item) >= theta_hit, ascending by id.
    std::vector<Hit> search(std::span<const float> query, double theta_hit,
                            SearchMode mode = SearchMode::exact) const;

    // Reference implementation: cosine against every item.
    std::vector<Hit> linear_scan(std::span<const float> query, double theta_hit) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t dim_ = 0;
    std::vector<embedding::Vector> vectors_;  // as given, used for the final cosine
    std::vector<std::size_t> assignments_;
    std::vector<std::vector<std::size_t>> members_;
    std::vector<embedding::Vector> centroids_;
    std::vector<double> radii_;  // max member distance to centroid, normalized space
    double max_radius_ = 0.0;
    std::vector<std::size_t> zero_items_;
    KdTree tree_;
    double bandwidth_ = 0.0;
};

// Free-function form of ClusterIndex::search.
std::vector<Hit> search(std::span<const float> query, const ClusterIndex& index, double theta_hit,
                        SearchMode mode = SearchMode::exact);

embedding::Vector normalized(std::span<const float> v);

}  // namespace apthunt::index

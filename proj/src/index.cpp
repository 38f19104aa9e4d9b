#include "apthunt/index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "apthunt/errors.hpp"

namespace apthunt::index {

using embedding::Vector;

embedding::Vector normalized(std::span<const float> v) {
    const double n = embedding::norm(v);
    Vector out(v.begin(), v.end());
    if (n > 0)
        for (auto& x : out) x = static_cast<float>(x / n);
    return out;
}

namespace {

// Row-major copy of the distinct points, rows padded to a multiple of 8.
struct Packed {
    std::size_t stride = 0;
    std::vector<float> data;
    const float* row(std::size_t i) const { return data.data() + i * stride; }
};

inline float packed_d2(const float* a, const float* b, std::size_t stride) {
    float lane[8] = {};
    for (std::size_t k = 0; k < stride; k += 8)
        for (std::size_t j = 0; j < 8; ++j) {
            const float d = a[k + j] - b[k + j];
            lane[j] += d * d;
        }
    return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + ((lane[4] + lane[5]) + (lane[6] + lane[7]));
}

}  // namespace

MeanShiftResult mean_shift(std::span<const Vector> points, double bandwidth, const MeanShiftOptions& opts) {
    if (points.empty()) throw InputError("mean_shift needs at least one point");
    if (!(bandwidth > 0)) throw InputError("mean_shift bandwidth must be positive");
    const std::size_t dim = points.front().size();
    const double bw2 = bandwidth * bandwidth;
    const double merge2 = 0.25 * bw2;

    // identical points collapse into one weighted point
    std::vector<std::size_t> uniq, weight;
    {
        std::map<std::span<const float>, std::size_t, decltype([](auto a, auto b) {
                     return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
                 })>
            first;
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto [it, fresh] = first.emplace(std::span<const float>(points[i]), uniq.size());
            if (fresh) {
                uniq.push_back(i);
                weight.push_back(1);
            } else {
                ++weight[it->second];
            }
        }
    }

    Packed pk;
    pk.stride = (dim + 7) / 8 * 8;
    pk.data.assign(uniq.size() * pk.stride, 0.0f);
    for (std::size_t u = 0; u < uniq.size(); ++u)
        std::copy(points[uniq[u]].begin(), points[uniq[u]].end(), pk.data.begin() + u * pk.stride);
    const auto fbw2 = static_cast<float>(bw2);

    std::vector<std::size_t> seeds;  // indices into uniq
    for (std::size_t u = 0; u < uniq.size() && seeds.size() < opts.max_seeds; ++u) {
        bool covered = false;
        for (auto s : seeds)
            if (packed_d2(pk.row(u), pk.row(s), pk.stride) <= fbw2) {
                covered = true;
                break;
            }
        if (!covered) seeds.push_back(u);
    }

    struct Mode {
        Vector at;
        std::size_t support = 0;
    };
    std::vector<Mode> modes;
    modes.reserve(seeds.size());
    std::vector<double> acc(dim);
    // window points all lie within 1.5 bw of `origin` while cur stays within bw/2 of it
    const auto reach2 = static_cast<float>(2.25 * bw2), drift2 = static_cast<float>(0.25 * bw2);
    std::vector<std::size_t> local;
    std::vector<float> cur(pk.stride), origin(pk.stride);
    for (auto s : seeds) {
        std::copy_n(pk.row(s), pk.stride, cur.begin());
        bool fresh = true;
        std::size_t support = 0;
        for (int it = 0; it < opts.max_iterations; ++it) {
            if (fresh || packed_d2(origin.data(), cur.data(), pk.stride) > drift2) {
                fresh = false;
                origin = cur;
                local.clear();
                for (std::size_t u = 0; u < uniq.size(); ++u)
                    if (packed_d2(origin.data(), pk.row(u), pk.stride) <= reach2) local.push_back(u);
            }
            std::fill(acc.begin(), acc.end(), 0.0);
            support = 0;
            for (auto u : local) {
                const float* p = pk.row(u);
                if (packed_d2(cur.data(), p, pk.stride) <= fbw2) {
                    const auto w = static_cast<double>(weight[u]);
                    for (std::size_t k = 0; k < dim; ++k) acc[k] += w * p[k];
                    support += weight[u];
                }
            }
            if (support == 0) break;  // unreachable: the seed starts on a point
            double shift2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const auto next = static_cast<float>(acc[k] / static_cast<double>(support));
                const double d = static_cast<double>(next) - cur[k];
                shift2 += d * d;
                cur[k] = next;
            }
            if (shift2 < opts.convergence * opts.convergence) break;
        }
        modes.push_back(Mode{Vector(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(dim)), support});
    }

    // Denser modes absorb nearby weaker ones; seed order breaks ties.
    std::vector<std::size_t> order(modes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return modes[a].support > modes[b].support; });
    std::vector<Vector> kept;
    for (auto m : order) {
        bool near = false;
        for (const auto& k : kept)
            if (squared_distance(modes[m].at, k) < merge2) {
                near = true;
                break;
            }
        if (!near) kept.push_back(modes[m].at);
    }

    KdTree tree(kept);
    std::vector<std::size_t> raw(points.size());
    std::vector<std::size_t> used(kept.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        raw[i] = tree.nearest(points[i]);
        ++used[raw[i]];
    }
    // drop modes that attracted no point, keep ids dense
    MeanShiftResult r;
    std::vector<std::size_t> remap(kept.size(), 0);
    for (std::size_t c = 0; c < kept.size(); ++c) {
        if (used[c] == 0) continue;
        remap[c] = r.centroids.size();
        r.centroids.push_back(kept[c]);
    }
    r.assignments.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) r.assignments[i] = remap[raw[i]];
    return r;
}

double estimate_bandwidth(std::span<const Vector> points, double quantile, std::size_t sample) {
    if (points.size() < 2) return 1.0;
    const std::size_t m = std::min(points.size(), sample);
    std::vector<std::size_t> picked(m);
    for (std::size_t i = 0; i < m; ++i) picked[i] = i * points.size() / m;
    std::vector<double> d;
    d.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) d.push_back(std::sqrt(squared_distance(points[picked[i]], points[picked[j]])));
    const auto k = static_cast<std::size_t>(std::clamp(quantile, 0.0, 1.0) * static_cast<double>(d.size() - 1));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    const double bw = d[k];
    // identical points: any positive kernel gives one cluster
    return bw > 0 ? bw : 1.0;
}

double hit_radius(double theta_hit) { return std::sqrt(std::max(0.0, 2.0 - 2.0 * theta_hit)); }

ClusterIndex::ClusterIndex(std::vector<Vector> vectors, const IndexOptions& opts) : vectors_(std::move(vectors)) {
    if (vectors_.empty()) return;
    dim_ = vectors_.front().size();
    assignments_.assign(vectors_.size(), npos);

    std::vector<Vector> unit;
    std::vector<std::size_t> unit_ids;
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        if (vectors_[i].size() != dim_) throw InputError("index vectors must share one dimension");
        if (embedding::norm(vectors_[i]) == 0.0) {
            zero_items_.push_back(i);
            continue;
        }
        unit.push_back(normalized(vectors_[i]));
        unit_ids.push_back(i);
    }
    if (unit.empty()) return;

    if (opts.bandwidth > 0)
        bandwidth_ = opts.bandwidth;
    else if (opts.rule == BandwidthRule::hit_radius && opts.theta_hit < 1.0)
        bandwidth_ = hit_radius(opts.theta_hit);
    else
        bandwidth_ = estimate_bandwidth(unit, opts.bandwidth_quantile);
    auto ms = mean_shift(unit, bandwidth_, opts.mean_shift);
    centroids_ = std::move(ms.centroids);
    members_.assign(centroids_.size(), {});
    radii_.assign(centroids_.size(), 0.0);
    for (std::size_t u = 0; u < unit.size(); ++u) {
        const auto c = ms.assignments[u];
        assignments_[unit_ids[u]] = c;
        members_[c].push_back(unit_ids[u]);
        radii_[c] = std::max(radii_[c], std::sqrt(squared_distance(unit[u], centroids_[c])));
    }
    max_radius_ = *std::max_element(radii_.begin(), radii_.end());
    tree_ = KdTree(centroids_);
}

std::vector<Hit> ClusterIndex::linear_scan(std::span<const float> query, double theta_hit) const {
    std::vector<Hit> out;
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        const double c = embedding::cosine(query, vectors_[i]);
        if (c >= theta_hit) out.emplace_back(i, c);
    }
    return out;
}

std::vector<Hit> ClusterIndex::search(std::span<const float> query, double theta_hit, SearchMode mode) const {
    std::vector<Hit> out;
    if (vectors_.empty()) return out;
    if (query.size() != dim_) throw InputError("search query has wrong dimension");

    const double qn = embedding::norm(query);
    if (qn == 0.0) {
        // cosine convention: every similarity is 0
        if (theta_hit <= 0.0)
            for (std::size_t i = 0; i < vectors_.size(); ++i) out.emplace_back(i, 0.0);
        return out;
    }
    if (theta_hit <= 0.0)
        for (auto z : zero_items_) out.emplace_back(z, 0.0);

    auto scan = [&](std::size_t cluster) {
        for (auto i : members_[cluster]) {
            const double c = embedding::cosine(query, vectors_[i]);
            if (c >= theta_hit) out.emplace_back(i, c);
        }
    };

    if (!centroids_.empty()) {
        const Vector q = normalized(query);
        if (mode == SearchMode::nearest_cluster) {
            scan(tree_.nearest(q));
        } else {
            // unit vectors: cos >= t  <=>  |q - x| <= sqrt(2 - 2t)
            constexpr double kSlack = 1e-6;
            const double r = hit_radius(theta_hit);
            for (auto c : tree_.within(q, r + max_radius_ + kSlack)) {
                const double bound = r + radii_[c] + kSlack;
                if (squared_distance(q, centroids_[c]) <= bound * bound) scan(c);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Hit& a, const Hit& b) { return a.first < b.first; });
    return out;
}

std::vector<Hit> search(std::span<const float> query, const ClusterIndex& index, double theta_hit, SearchMode mode) {
    return index.search(query, theta_hit, mode);
}

}  // namespace apthunt::index

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "apthunt/amid.hpp"
#include "apthunt/lifting.hpp"
#include "json.hpp"

namespace apthunt::graph {

using NodeId = std::uint64_t;
using EdgeId = std::uint64_t;

inline constexpr std::int64_t kNsPerSecond = 1'000'000'000;

// One technique label on an edge. Repeated events fold into the edge and keep
// the highest score seen per technique.
struct EdgeMatch {
    std::string technique;
    double score = 0.0;
};

struct ProvNode {
    NodeId id = 0;
    std::string key;  // host|kind|value, processes host|process|pid[@start]
    std::string host;
    lifting::ObjectKind kind = lifting::ObjectKind::file;
    std::string value;  // path, address, registry key or process name
    std::string image;  // processes only
    double score = 0.0;
    double seed_score = 0.0;
    std::int64_t first_ts = 0;
    std::int64_t last_ts = 0;
    std::set<std::string> stage_labels;
    std::vector<EdgeId> out;
    std::vector<EdgeId> in;

    bool seed() const noexcept { return seed_score > 0.0; }
};

struct ProvEdge {
    EdgeId id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    std::string syscall;
    std::string cmdline;  // of the first event folded into the edge
    std::int64_t first_ts = 0;
    std::int64_t last_ts = 0;
    std::uint64_t count = 0;
    std::vector<EdgeMatch> matches;  // sorted by technique
    std::optional<std::int64_t> first_match_ts;

    double max_score() const noexcept;
};

std::string node_key(const std::string& host, const lifting::ProcessDesc& p);
std::string node_key(const std::string& host, const lifting::ObjectDesc& o);

struct GraphOptions {
    std::int64_t out_of_order_tolerance = 5 * kNsPerSecond;
    std::int64_t window = 24 * 3600 * kNsPerSecond;
};

enum class IngestStatus { added, merged, quarantined };

struct Candidate {
    std::vector<NodeId> nodes;  // ascending
    double total_score = 0.0;
};

// Self-contained copy of part of the graph, safe to hand to other threads.
struct Subgraph {
    std::vector<ProvNode> nodes;  // by id, adjacency restricted to the subgraph
    std::vector<ProvEdge> edges;  // by id

    const ProvNode* node(NodeId id) const;
    const ProvEdge* edge(EdgeId id) const;
    const ProvNode* find(std::string_view key) const;
};

class ProvGraph {
public:
    explicit ProvGraph(GraphOptions opts = {});

    // Events older than the host's latest timestamp minus the tolerance are
    // quarantined and leave the graph untouched.
    IngestStatus ingest(const lifting::RawEvent& event, std::span<const amid::MatchResult> matches);

    // score = max(seed_score, max over seeds s of decay^d(s, v) * seed_score(s)),
    // d <= hops, edges walked in both directions. Throws InputError for decay
    // outside (0, 1) or negative hops.
    void propagate(double decay, int hops);

    // Connected components of the nodes scoring >= floor, by total score
    // descending.
    std::vector<Candidate> candidates(double floor) const;

    // Drops nodes last touched before now - window that score below floor,
    // together with their edges. Returns the number of nodes removed.
    std::size_t evict(std::int64_t now, double floor);
    // Drops every node last touched before now - window, whatever its score.
    // Meant for the end of a checkpoint, once every candidate is decided.
    // Returns the keys removed.
    std::vector<std::string> retire(std::int64_t now);

    Subgraph extract(std::span<const NodeId> nodes) const;

    const ProvNode* node(NodeId id) const;
    const ProvNode* find(std::string_view key) const;
    const ProvEdge* edge(EdgeId id) const;
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t quarantined() const noexcept { return quarantined_; }
    const std::unordered_map<NodeId, ProvNode>& nodes() const noexcept { return nodes_; }
    const std::unordered_map<EdgeId, ProvEdge>& edges() const noexcept { return edges_; }
    const GraphOptions& options() const noexcept { return opts_; }

private:
    NodeId upsert(std::string key, const std::string& host, lifting::ObjectKind kind, std::string value,
                  std::string image, std::int64_t ts);
    void remove_nodes(const std::unordered_set<NodeId>& gone);

    struct EdgeKey {
        NodeId src, dst;
        std::string syscall;
        bool operator==(const EdgeKey&) const = default;
    };
    struct EdgeKeyHash {
        std::size_t operator()(const EdgeKey& k) const noexcept;
    };

    GraphOptions opts_;
    std::unordered_map<NodeId, ProvNode> nodes_;
    std::unordered_map<std::string, NodeId> by_key_;
    std::unordered_map<EdgeId, ProvEdge> edges_;
    std::unordered_map<EdgeKey, EdgeId, EdgeKeyHash> edge_index_;
    std::unordered_map<std::string, std::int64_t> host_clock_;
    NodeId next_node_ = 1;
    EdgeId next_edge_ = 1;
    std::size_t quarantined_ = 0;
};

// Union of two extracts of one graph. A node of `older` whose key reappears in
// `newer` under another id is folded into the newer node; parallel edges fold
// like repeated events.
Subgraph merge(const Subgraph& older, const Subgraph& newer);

// JSON Graph Format (single graph, directed).
nlohmann::json to_jgf(const Subgraph& g);
Subgraph from_jgf(const nlohmann::json& j);  // throws SchemaError

}  // namespace apthunt::graph

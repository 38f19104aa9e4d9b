#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "apthunt/graph.hpp"
#include "json.hpp"

namespace apthunt::reasoning {

enum class Stage {
    initial_compromise,
    establish_foothold,
    escalate_privilege,
    internal_reconnaissance,
    move_laterally,
    maintain_persistence,
    complete_mission,
};

inline constexpr std::array<Stage, 7> kAllStages = {
    Stage::initial_compromise,   Stage::establish_foothold, Stage::escalate_privilege,  Stage::internal_reconnaissance,
    Stage::move_laterally,       Stage::maintain_persistence, Stage::complete_mission,
};

using StageSet = std::set<Stage>;

std::string_view to_string(Stage s);     // "InitialCompromise"
std::string_view display_name(Stage s);  // "Initial Compromise"
std::string_view short_name(Stage s);    // "IC"
Stage stage_from_string(std::string_view s);  // accepts any of the three spellings

// Lifecycle stages of one ATT&CK tactic (shortname or display name).
// Throws LookupError for tactics outside the enterprise matrix.
StageSet tactic_to_stages(std::string_view tactic);

// Technique -> tactics table.
class TacticMap {
public:
    TacticMap() = default;
    void add(std::string technique, std::vector<std::string> tactics);

    // Sub-techniques without an own row fall back to their parent id.
    // Throws LookupError naming the uid when neither is known.
    const std::vector<std::string>& tactics_of(std::string_view uid) const;
    bool contains(std::string_view uid) const;
    std::size_t size() const noexcept { return table_.size(); }
    const std::string& version() const noexcept { return version_; }

    static TacticMap parse(const nlohmann::json& j);
    static TacticMap load(const std::filesystem::path& path);
    static const TacticMap& bundled();

private:
    std::map<std::string, std::vector<std::string>, std::less<>> table_;
    std::string version_;
};

StageSet technique_to_stages(std::string_view uid, const TacticMap& tactics);

struct Evidence {
    graph::EdgeId edge = 0;
    graph::NodeId node = 0;  // source node of the edge
    std::string technique;
    double score = 0.0;
    std::int64_t ts = 0;  // first matched event on the edge

    bool operator==(const Evidence&) const = default;
};

struct StageNodes {
    std::set<graph::NodeId> nodes;
    std::int64_t earliest = 0;
    std::int64_t latest = 0;

    bool operator==(const StageNodes&) const = default;
};

struct CandidateLifecycle {
    std::vector<graph::NodeId> subgraph;  // node ids of the candidate
    std::map<graph::NodeId, StageSet> node_stages;
    std::map<Stage, StageNodes> stage_nodes;
    std::map<Stage, std::vector<Evidence>> evidence;  // by ts, then edge, then technique

    StageSet stages() const;
    bool operator==(const CandidateLifecycle&) const = default;
};

struct ReasoningOptions {
    double alpha = 0.05;
};

// Per-stage weight of one edge: sum of the scores of its techniques that map
// to the stage.
std::map<Stage, double> edge_stage_weights(const graph::ProvEdge& edge, const TacticMap& tactics);

// Stages of one matched edge after relatively-high selection.
StageSet select_edge_stages(const graph::ProvEdge& edge, const TacticMap& tactics, const ReasoningOptions& opts = {});

// Stages of a node from its matched outgoing edges, each selected edge stage
// weighted by the edge's anomaly score. Empty when no outgoing edge matches.
StageSet assign_node_stages(const graph::ProvNode& node, const graph::Subgraph& g, const TacticMap& tactics,
                            const ReasoningOptions& opts = {});

// Labels every node of the subgraph: nodes with matched outgoing edges first,
// then predecessors by vote of their labeled successors (weighted by successor
// score) until nothing changes. Sinks without matched edges stay unlabeled.
std::map<graph::NodeId, StageSet> label_nodes(const graph::Subgraph& g, const TacticMap& tactics,
                                              const ReasoningOptions& opts = {});

CandidateLifecycle build_lifecycle(const graph::Subgraph& g, const TacticMap& tactics,
                                   const ReasoningOptions& opts = {});

// Drops Initial Compromise evidence later than the earliest evidence of any
// other stage and Complete Mission evidence earlier than the latest evidence
// of any other stage. Stages left without evidence disappear.
CandidateLifecycle streamline(CandidateLifecycle lc);

struct Decision {
    bool alert = false;
    std::vector<std::string> rationale;  // applied rules, or the unmet ones
};

bool completeness_predicate(const StageSet& stages);
Decision raise_alert(const CandidateLifecycle& lc);

struct Alert {
    std::string id;
    int revision = 0;
    CandidateLifecycle lifecycle;
    std::vector<std::string> rationale;
    std::int64_t created_ts = 0;
    graph::Subgraph subgraph;

    std::set<std::string> node_keys() const;
};

nlohmann::json to_json(const CandidateLifecycle& lc, const graph::Subgraph& g);
nlohmann::json alert_to_json(const Alert& a);
Alert alert_from_json(const nlohmann::json& j);  // throws SchemaError
nlohmann::json suppression_to_json(const CandidateLifecycle& lc, const graph::Subgraph& g, const Decision& d,
                                   std::int64_t ts);

}  // namespace apthunt::reasoning

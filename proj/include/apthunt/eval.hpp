#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace apthunt::eval {

struct AttackGroundTruth {
    std::string id;
    std::set<std::string> nodes;
};

struct GroundTruth {
    std::vector<AttackGroundTruth> attacks;
    std::set<std::string> benign_nodes;
    // When false, a reported node that is neither attack nor benign is a
    // reconciliation error; when true it counts as benign.
    bool unlabeled_is_benign = false;

    std::set<std::string> attack_nodes() const;
    static GroundTruth parse(const nlohmann::json& j);
    static GroundTruth load(const std::filesystem::path& path);
};

struct EvalMetrics {
    std::size_t gtp = 0, gfp = 0, gfn = 0;
    std::size_t ntp = 0, nfp = 0, nfn = 0;
    // nullopt when the denominator is zero
    std::optional<double> graph_precision, graph_recall, node_precision, node_recall;
};

using ReportedGraph = std::set<std::string>;  // node keys

// Throws ReconciliationError listing reported node ids absent from the
// ground truth.
EvalMetrics evaluate(const std::vector<ReportedGraph>& reported, const GroundTruth& truth);

nlohmann::json to_json(const EvalMetrics& m);

}  // namespace apthunt::eval

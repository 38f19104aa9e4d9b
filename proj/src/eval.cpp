#include "apthunt/eval.hpp"

#include "apthunt/errors.hpp"
#include "apthunt/util.hpp"

namespace apthunt::eval {

using nlohmann::json;

std::set<std::string> GroundTruth::attack_nodes() const {
    std::set<std::string> out;
    for (const auto& a : attacks) out.insert(a.nodes.begin(), a.nodes.end());
    return out;
}

GroundTruth GroundTruth::parse(const json& j) {
    GroundTruth g;
    try {
        for (const auto& a : j.at("attacks"))
            g.attacks.push_back({a.value("id", ""), a.at("nodes").get<std::set<std::string>>()});
        g.benign_nodes = j.value("benign_nodes", std::set<std::string>{});
        g.unlabeled_is_benign = j.value("unlabeled", std::string("error")) == "benign";
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed ground truth: ") + e.what());
    }
    return g;
}

GroundTruth GroundTruth::load(const std::filesystem::path& path) {
    try {
        return parse(json::parse(util::read_file(path)));
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalMetrics evaluate(const std::vector<ReportedGraph>& reported, const GroundTruth& truth) {
    const auto attack = truth.attack_nodes();
    std::set<std::string> unknown;
    for (const auto& g : reported)
        for (const auto& n : g)
            if (!attack.count(n) && !truth.benign_nodes.count(n) && !truth.unlabeled_is_benign) unknown.insert(n);
    if (!unknown.empty()) {
        std::vector<std::string> list(unknown.begin(), unknown.end());
        if (list.size() > 20) list.resize(20);
        throw ReconciliationError(std::to_string(unknown.size()) +
                                  " reported node ids are not in the ground truth: " + util::join(list, ", "));
    }

    EvalMetrics m;
    std::set<std::string> reported_nodes;
    for (const auto& g : reported) {
        bool has_attack = false;
        for (const auto& n : g) {
            reported_nodes.insert(n);
            has_attack = has_attack || attack.count(n);
        }
        ++(has_attack ? m.gtp : m.gfp);
    }
    for (const auto& a : truth.attacks) {
        bool found = false;
        for (const auto& g : reported)
            for (const auto& n : a.nodes)
                if (g.count(n)) {
                    found = true;
                    break;
                }
        if (!found) ++m.gfn;
    }
    for (const auto& n : reported_nodes) ++(attack.count(n) ? m.ntp : m.nfp);
    for (const auto& n : attack)
        if (!reported_nodes.count(n)) ++m.nfn;

    m.graph_precision = ratio(m.gtp, m.gtp + m.gfp);
    m.graph_recall = ratio(m.gtp, m.gtp + m.gfn);
    m.node_precision = ratio(m.ntp, m.ntp + m.nfp);
    m.node_recall = ratio(m.ntp, m.ntp + m.nfn);
    return m;
}

json to_json(const EvalMetrics& m) {
    auto opt = [](const std::optional<double>& v) -> json { return v ? json(*v) : json(nullptr); };
    return {{"gtp", m.gtp},
            {"gfp", m.gfp},
            {"gfn", m.gfn},
            {"ntp", m.ntp},
            {"nfp", m.nfp},
            {"nfn", m.nfn},
            {"graph_precision", opt(m.graph_precision)},
            {"graph_recall", opt(m.graph_recall)},
            {"node_precision", opt(m.node_precision)},
            {"node_recall", opt(m.node_recall)}};
}

}  // namespace apthunt::eval

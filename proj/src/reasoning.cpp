#include "apthunt/reasoning.hpp"

#include <algorithm>
#include <spdlog/spdlog.h>

#include "apthunt/errors.hpp"
#include "apthunt/stats.hpp"
#include "apthunt/util.hpp"

#ifndef APTHUNT_DATA_DIR
#define APTHUNT_DATA_DIR "data"
#endif

namespace apthunt::reasoning {

using graph::NodeId;
using nlohmann::json;

namespace {

struct StageNames {
    Stage stage;
    std::string_view id, display, abbrev;
};

constexpr StageNames kNames[] = {
    {Stage::initial_compromise, "InitialCompromise", "Initial Compromise", "IC"},
    {Stage::establish_foothold, "EstablishFoothold", "Establish Foothold", "EF"},
    {Stage::escalate_privilege, "EscalatePrivilege", "Escalate Privilege", "EP"},
    {Stage::internal_reconnaissance, "InternalReconnaissance", "Internal Reconnaissance", "IR"},
    {Stage::move_laterally, "MoveLaterally", "Move Laterally", "ML"},
    {Stage::maintain_persistence, "MaintainPersistence", "Maintain Persistence", "MP"},
    {Stage::complete_mission, "CompleteMission", "Complete Mission", "CM"},
};

const StageNames& names(Stage s) { return kNames[static_cast<int>(s)]; }

const std::map<std::string, Stage, std::less<>>& tactic_table() {
    static const std::map<std::string, Stage, std::less<>> t = {
        {"reconnaissance", Stage::initial_compromise},
        {"initial-access", Stage::initial_compromise},
        {"execution", Stage::establish_foothold},
        {"resource-development", Stage::establish_foothold},
        {"command-and-control", Stage::establish_foothold},
        {"privilege-escalation", Stage::escalate_privilege},
        {"credential-access", Stage::escalate_privilege},
        {"discovery", Stage::internal_reconnaissance},
        {"collection", Stage::internal_reconnaissance},
        {"lateral-movement", Stage::move_laterally},
        {"persistence", Stage::maintain_persistence},
        {"defense-evasion", Stage::maintain_persistence},
        {"exfiltration", Stage::complete_mission},
        {"impact", Stage::complete_mission},
    };
    return t;
}

std::vector<stats::LabeledScore> labeled(const std::map<Stage, double>& w) {
    std::vector<stats::LabeledScore> out;
    for (const auto& [s, v] : w) out.emplace_back(std::string(names(s).id), v);
    return out;
}

StageSet select(const std::map<Stage, double>& w, double alpha) {
    StageSet out;
    if (w.empty()) return out;
    const auto l = labeled(w);
    for (const auto& name : stats::select_relatively_high(l, alpha)) out.insert(stage_from_string(name));
    return out;
}

}  // namespace

std::string_view to_string(Stage s) { return names(s).id; }
std::string_view display_name(Stage s) { return names(s).display; }
std::string_view short_name(Stage s) { return names(s).abbrev; }

Stage stage_from_string(std::string_view s) {
    for (const auto& n : kNames)
        if (s == n.id || s == n.display || s == n.abbrev) return n.stage;
    throw InputError("unknown lifecycle stage '" + std::string(s) + "'");
}

StageSet tactic_to_stages(std::string_view tactic) {
    auto key = util::to_lower(util::trim(tactic));
    std::replace(key.begin(), key.end(), ' ', '-');
    auto it = tactic_table().find(key);
    if (it == tactic_table().end()) throw LookupError("unknown tactic '" + std::string(tactic) + "'");
    return {it->second};
}

void TacticMap::add(std::string technique, std::vector<std::string> tactics) {
    table_[std::move(technique)] = std::move(tactics);
}

bool TacticMap::contains(std::string_view uid) const {
    if (table_.count(uid)) return true;
    auto dot = uid.find('.');
    return dot != std::string_view::npos && table_.count(uid.substr(0, dot));
}

const std::vector<std::string>& TacticMap::tactics_of(std::string_view uid) const {
    if (auto it = table_.find(uid); it != table_.end()) return it->second;
    if (auto dot = uid.find('.'); dot != std::string_view::npos)
        if (auto it = table_.find(uid.substr(0, dot)); it != table_.end()) return it->second;
    throw LookupError("technique " + std::string(uid) + " is not in the tactic table");
}

TacticMap TacticMap::parse(const json& j) {
    TacticMap m;
    try {
        m.version_ = j.value("version", "");
        for (const auto& [uid, tactics] : j.at("techniques").items()) {
            auto list = tactics.get<std::vector<std::string>>();
            for (const auto& t : list) tactic_to_stages(t);  // validates
            m.add(uid, std::move(list));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed tactic table: ") + e.what());
    }
    return m;
}

TacticMap TacticMap::load(const std::filesystem::path& path) {
    try {
        return parse(json::parse(util::read_file(path)));
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

const TacticMap& TacticMap::bundled() {
    static const TacticMap m = load(std::filesystem::path(APTHUNT_DATA_DIR) / "attack_v10_tactics.json");
    return m;
}

StageSet technique_to_stages(std::string_view uid, const TacticMap& tactics) {
    StageSet out;
    for (const auto& t : tactics.tactics_of(uid)) {
        auto s = tactic_to_stages(t);
        out.insert(s.begin(), s.end());
    }
    return out;
}

StageSet CandidateLifecycle::stages() const {
    StageSet out;
    for (const auto& [s, ev] : evidence)
        if (!ev.empty()) out.insert(s);
    return out;
}

std::map<Stage, double> edge_stage_weights(const graph::ProvEdge& edge, const TacticMap& tactics) {
    std::map<Stage, double> w;
    for (const auto& m : edge.matches) {
        StageSet stages;
        try {
            stages = technique_to_stages(m.technique, tactics);
        } catch (const LookupError& e) {
            spdlog::warn("{}", e.what());
            continue;
        }
        for (auto s : stages) w[s] += m.score;
    }
    return w;
}

StageSet select_edge_stages(const graph::ProvEdge& edge, const TacticMap& tactics, const ReasoningOptions& opts) {
    return select(edge_stage_weights(edge, tactics), opts.alpha);
}

StageSet assign_node_stages(const graph::ProvNode& node, const graph::Subgraph& g, const TacticMap& tactics,
                            const ReasoningOptions& opts) {
    std::map<Stage, double> w;
    for (auto eid : node.out) {
        const auto* e = g.edge(eid);
        if (!e || e->matches.empty()) continue;
        const auto ew = edge_stage_weights(*e, tactics);
        for (auto s : select(ew, opts.alpha)) w[s] += ew.at(s);
    }
    return select(w, opts.alpha);
}

std::map<NodeId, StageSet> label_nodes(const graph::Subgraph& g, const TacticMap& tactics,
                                       const ReasoningOptions& opts) {
    std::map<NodeId, StageSet> labels;
    for (const auto& n : g.nodes) {
        auto s = assign_node_stages(n, g, tactics, opts);
        if (!s.empty()) labels[n.id] = std::move(s);
    }
    // predecessors vote from their labeled successors, one layer per round
    for (;;) {
        std::map<NodeId, StageSet> round;
        for (const auto& n : g.nodes) {
            if (labels.count(n.id) || n.out.empty()) continue;
            std::map<Stage, double> w;
            for (auto eid : n.out) {
                const auto* e = g.edge(eid);
                auto it = labels.find(e->dst);
                if (it == labels.end()) continue;
                const double score = g.node(e->dst)->score;
                for (auto s : it->second) w[s] += score;
            }
            if (!w.empty()) round[n.id] = select(w, opts.alpha);
        }
        if (round.empty()) break;
        labels.merge(round);
    }
    return labels;
}

namespace {

void refresh_stage_nodes(CandidateLifecycle& lc) {
    for (auto it = lc.evidence.begin(); it != lc.evidence.end();) {
        if (it->second.empty())
            it = lc.evidence.erase(it);
        else
            ++it;
    }
    std::map<Stage, StageNodes> sn;
    for (const auto& [s, ev] : lc.evidence) {
        auto& x = sn[s];
        x.earliest = ev.front().ts;
        x.latest = ev.front().ts;
        for (const auto& e : ev) {
            x.earliest = std::min(x.earliest, e.ts);
            x.latest = std::max(x.latest, e.ts);
        }
        for (const auto& [node, stages] : lc.node_stages)
            if (stages.count(s)) x.nodes.insert(node);
        for (const auto& e : ev) x.nodes.insert(e.node);
    }
    lc.stage_nodes = std::move(sn);
}

}  // namespace

CandidateLifecycle build_lifecycle(const graph::Subgraph& g, const TacticMap& tactics, const ReasoningOptions& opts) {
    CandidateLifecycle lc;
    for (const auto& n : g.nodes) lc.subgraph.push_back(n.id);
    lc.node_stages = label_nodes(g, tactics, opts);

    for (const auto& n : g.nodes) {
        auto ns = lc.node_stages.find(n.id);
        if (ns == lc.node_stages.end()) continue;
        for (auto eid : n.out) {
            const auto* e = g.edge(eid);
            if (e->matches.empty()) continue;
            const auto es = select_edge_stages(*e, tactics, opts);
            for (const auto& m : e->matches) {
                if (!tactics.contains(m.technique)) continue;
                for (auto s : technique_to_stages(m.technique, tactics))
                    if (es.count(s) && ns->second.count(s))
                        lc.evidence[s].push_back(Evidence{e->id, n.id, m.technique, m.score,
                                                          e->first_match_ts.value_or(e->first_ts)});
            }
        }
    }
    for (auto& [s, ev] : lc.evidence)
        std::sort(ev.begin(), ev.end(), [](const Evidence& a, const Evidence& b) {
            if (a.ts != b.ts) return a.ts < b.ts;
            if (a.edge != b.edge) return a.edge < b.edge;
            return a.technique < b.technique;
        });
    refresh_stage_nodes(lc);
    return lc;
}

CandidateLifecycle streamline(CandidateLifecycle lc) {
    auto bound = [&](Stage skip, bool earliest) -> std::optional<std::int64_t> {
        std::optional<std::int64_t> b;
        for (const auto& [s, ev] : lc.evidence) {
            if (s == skip) continue;
            for (const auto& e : ev)
                if (!b || (earliest ? e.ts < *b : e.ts > *b)) b = e.ts;
        }
        return b;
    };
    if (auto it = lc.evidence.find(Stage::initial_compromise); it != lc.evidence.end())
        if (auto first_other = bound(Stage::initial_compromise, true))
            std::erase_if(it->second, [&](const Evidence& e) { return e.ts > *first_other; });
    if (auto it = lc.evidence.find(Stage::complete_mission); it != lc.evidence.end())
        if (auto last_other = bound(Stage::complete_mission, false))
            std::erase_if(it->second, [&](const Evidence& e) { return e.ts < *last_other; });
    refresh_stage_nodes(lc);
    return lc;
}

bool completeness_predicate(const StageSet& s) {
    const bool middle = s.count(Stage::escalate_privilege) || s.count(Stage::internal_reconnaissance) ||
                        s.count(Stage::move_laterally) || s.count(Stage::maintain_persistence);
    return s.count(Stage::initial_compromise) && s.count(Stage::establish_foothold) && middle;
}

Decision raise_alert(const CandidateLifecycle& lc) {
    const auto s = lc.stages();
    Decision d;
    const bool middle = s.count(Stage::escalate_privilege) || s.count(Stage::internal_reconnaissance) ||
                        s.count(Stage::move_laterally) || s.count(Stage::maintain_persistence);
    if (!s.count(Stage::initial_compromise)) d.rationale.push_back("missing Initial Compromise");
    if (!s.count(Stage::establish_foothold)) d.rationale.push_back("missing Establish Foothold");
    if (!middle)
        d.rationale.push_back(
            "missing a stage among Escalate Privilege, Internal Reconnaissance, Move Laterally, Maintain Persistence");
    d.alert = d.rationale.empty();
    if (d.alert) {
        d.rationale.push_back("Initial Compromise present");
        d.rationale.push_back("Establish Foothold present");
        for (auto st : {Stage::escalate_privilege, Stage::internal_reconnaissance, Stage::move_laterally,
                        Stage::maintain_persistence})
            if (s.count(st)) d.rationale.push_back(std::string(display_name(st)) + " present");
        if (s.count(Stage::complete_mission)) d.rationale.push_back("Complete Mission present");
    }
    return d;
}

std::set<std::string> Alert::node_keys() const {
    std::set<std::string> out;
    for (const auto& n : subgraph.nodes) out.insert(n.key);
    return out;
}

json to_json(const CandidateLifecycle& lc, const graph::Subgraph& g) {
    auto key = [&](NodeId id) {
        const auto* n = g.node(id);
        return n ? n->key : std::to_string(id);
    };
    json stages = json::array();
    for (auto s : lc.stages()) stages.push_back(to_string(s));
    json sn = json::object();
    for (const auto& [s, x] : lc.stage_nodes) {
        json nodes = json::array();
        for (auto id : x.nodes) nodes.push_back(key(id));
        sn[std::string(to_string(s))] = {{"nodes", nodes}, {"earliest", x.earliest}, {"latest", x.latest}};
    }
    json ev = json::object();
    for (const auto& [s, list] : lc.evidence) {
        json arr = json::array();
        for (const auto& e : list) {
            const auto* edge = g.edge(e.edge);
            json item = {{"edge", e.edge}, {"technique", e.technique}, {"score", e.score}, {"ts", e.ts}};
            if (edge) {
                item["src"] = key(edge->src);
                item["dst"] = key(edge->dst);
                item["syscall"] = edge->syscall;
            }
            arr.push_back(item);
        }
        ev[std::string(to_string(s))] = arr;
    }
    return {{"stages", stages}, {"stage_nodes", sn}, {"evidence", ev}};
}

json alert_to_json(const Alert& a) {
    json nodes = json::array();
    for (const auto& k : a.node_keys()) nodes.push_back(k);
    return {{"type", a.revision == 0 ? "alert" : "alert_update"},
            {"id", a.id},
            {"revision", a.revision},
            {"created_ts", a.created_ts},
            {"rationale", a.rationale},
            {"nodes", nodes},
            {"lifecycle", to_json(a.lifecycle, a.subgraph)},
            {"subgraph", graph::to_jgf(a.subgraph)}};
}

Alert alert_from_json(const json& j) {
    Alert a;
    try {
        a.id = j.at("id").get<std::string>();
        a.revision = j.value("revision", 0);
        a.created_ts = j.value("created_ts", std::int64_t{0});
        a.rationale = j.value("rationale", std::vector<std::string>{});
        a.subgraph = graph::from_jgf(j.at("subgraph"));
        auto id_of = [&](const std::string& key) {
            const auto* n = a.subgraph.find(key);
            if (!n) throw SchemaError("alert " + a.id + " names node " + key + " outside its subgraph");
            return n->id;
        };
        auto& lc = a.lifecycle;
        for (const auto& n : a.subgraph.nodes) {
            lc.subgraph.push_back(n.id);
            if (n.stage_labels.empty()) continue;
            auto& set = lc.node_stages[n.id];
            for (const auto& s : n.stage_labels) set.insert(stage_from_string(s));
        }
        const auto& l = j.at("lifecycle");
        for (const auto& [name, list] : l.at("evidence").items()) {
            auto& ev = lc.evidence[stage_from_string(name)];
            for (const auto& e : list)
                ev.push_back(Evidence{e.at("edge").get<graph::EdgeId>(), id_of(e.at("src").get<std::string>()),
                                      e.at("technique").get<std::string>(), e.at("score").get<double>(),
                                      e.at("ts").get<std::int64_t>()});
        }
        for (const auto& [name, x] : l.at("stage_nodes").items()) {
            auto& sn = lc.stage_nodes[stage_from_string(name)];
            sn.earliest = x.at("earliest").get<std::int64_t>();
            sn.latest = x.at("latest").get<std::int64_t>();
            for (const auto& k : x.at("nodes")) sn.nodes.insert(id_of(k.get<std::string>()));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed alert record: ") + e.what());
    } catch (const InputError& e) {
        throw SchemaError(std::string("malformed alert record: ") + e.what());
    }
    return a;
}

json suppression_to_json(const CandidateLifecycle& lc, const graph::Subgraph& g, const Decision& d, std::int64_t ts) {
    json nodes = json::array();
    for (const auto& n : g.nodes) nodes.push_back(n.key);
    return {{"type", "suppression"}, {"ts", ts}, {"rules", d.rationale}, {"nodes", nodes}, {"lifecycle", to_json(lc, g)}};
}

}  // namespace apthunt::reasoning

#include "apthunt/graph.hpp"

#include <algorithm>
#include <functional>
#include <tuple>
#include <spdlog/spdlog.h>
#include <unordered_set>

#include "apthunt/errors.hpp"

namespace apthunt::graph {

using lifting::ObjectKind;
using nlohmann::json;

double ProvEdge::max_score() const noexcept {
    double m = 0.0;
    for (const auto& x : matches) m = std::max(m, x.score);
    return m;
}

namespace {

std::string process_key(const std::string& host, std::int64_t pid, const std::optional<std::int64_t>& start) {
    std::string k = host + "|process|" + std::to_string(pid);
    if (start) k += "@" + std::to_string(*start);
    return k;
}

template <class T>
const T* lookup(const std::vector<T>& v, std::uint64_t id) {
    auto it = std::lower_bound(v.begin(), v.end(), id, [](const T& x, std::uint64_t i) { return x.id < i; });
    return it != v.end() && it->id == id ? &*it : nullptr;
}

}  // namespace

std::string node_key(const std::string& host, const lifting::ProcessDesc& p) {
    return process_key(host, p.pid, p.start);
}

std::string node_key(const std::string& host, const lifting::ObjectDesc& o) {
    switch (o.kind) {
        case ObjectKind::process: return process_key(host, o.pid.value_or(0), o.start);
        default: return host + "|" + std::string(lifting::to_string(o.kind)) + "|" + o.value;
    }
}

const ProvNode* Subgraph::node(NodeId id) const { return lookup(nodes, id); }
const ProvEdge* Subgraph::edge(EdgeId id) const { return lookup(edges, id); }
const ProvNode* Subgraph::find(std::string_view key) const {
    for (const auto& n : nodes)
        if (n.key == key) return &n;
    return nullptr;
}

std::size_t ProvGraph::EdgeKeyHash::operator()(const EdgeKey& k) const noexcept {
    std::size_t h = std::hash<NodeId>{}(k.src);
    h ^= std::hash<NodeId>{}(k.dst) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::string>{}(k.syscall) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

ProvGraph::ProvGraph(GraphOptions opts) : opts_(opts) {}

NodeId ProvGraph::upsert(std::string key, const std::string& host, ObjectKind kind, std::string value,
                         std::string image, std::int64_t ts) {
    if (auto it = by_key_.find(key); it != by_key_.end()) {
        auto& n = nodes_.at(it->second);
        n.first_ts = std::min(n.first_ts, ts);
        n.last_ts = std::max(n.last_ts, ts);
        if (n.image.empty() && !image.empty()) n.image = std::move(image);
        return n.id;
    }
    ProvNode n;
    n.id = next_node_++;
    n.key = key;
    n.host = host;
    n.kind = kind;
    n.value = std::move(value);
    n.image = std::move(image);
    n.first_ts = n.last_ts = ts;
    by_key_.emplace(std::move(key), n.id);
    const auto id = n.id;
    nodes_.emplace(id, std::move(n));
    return id;
}

IngestStatus ProvGraph::ingest(const lifting::RawEvent& e, std::span<const amid::MatchResult> matches) {
    auto& clock = host_clock_[e.host];
    if (clock != 0 && e.ts < clock - opts_.out_of_order_tolerance) {
        ++quarantined_;
        spdlog::warn("quarantined out-of-order event on {} at {} (host clock {})", e.host, e.ts, clock);
        return IngestStatus::quarantined;
    }
    clock = std::max(clock, e.ts);

    const auto src = upsert(node_key(e.host, e.source), e.host, ObjectKind::process, e.source.name, e.source.image,
                            e.ts);
    const auto dst =
        upsert(node_key(e.host, e.destination), e.host, e.destination.kind, e.destination.value, {}, e.ts);

    IngestStatus status = IngestStatus::merged;
    EdgeKey ek{src, dst, e.syscall};
    auto it = edge_index_.find(ek);
    if (it == edge_index_.end()) {
        ProvEdge edge;
        edge.id = next_edge_++;
        edge.src = src;
        edge.dst = dst;
        edge.syscall = e.syscall;
        edge.cmdline = e.cmdline;
        edge.first_ts = edge.last_ts = e.ts;
        it = edge_index_.emplace(std::move(ek), edge.id).first;
        nodes_.at(src).out.push_back(edge.id);
        nodes_.at(dst).in.push_back(edge.id);
        edges_.emplace(edge.id, std::move(edge));
        status = IngestStatus::added;
    }
    auto& edge = edges_.at(it->second);
    edge.first_ts = std::min(edge.first_ts, e.ts);
    edge.last_ts = std::max(edge.last_ts, e.ts);
    ++edge.count;

    if (!matches.empty()) {
        double best = 0.0;
        for (const auto& m : matches) {
            best = std::max(best, m.score);
            auto pos = std::lower_bound(edge.matches.begin(), edge.matches.end(), m.atie_uid,
                                        [](const EdgeMatch& x, const std::string& u) { return x.technique < u; });
            if (pos != edge.matches.end() && pos->technique == m.atie_uid)
                pos->score = std::max(pos->score, m.score);
            else
                edge.matches.insert(pos, EdgeMatch{m.atie_uid, m.score});
        }
        edge.first_match_ts = std::min(edge.first_match_ts.value_or(e.ts), e.ts);
        for (NodeId id : {src, dst}) {
            auto& n = nodes_.at(id);
            n.seed_score = std::max(n.seed_score, best);
            n.score = std::max(n.score, n.seed_score);
        }
    }
    return status;
}

void ProvGraph::propagate(double decay, int hops) {
    if (!(decay > 0.0 && decay < 1.0)) throw InputError("decay must lie in (0, 1)");
    if (hops < 0) throw InputError("hops must be >= 0");

    std::unordered_map<NodeId, double> cur;
    cur.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_)
        if (n.seed_score > 0.0) cur[id] = n.seed_score;

    for (int h = 0; h < hops && !cur.empty(); ++h) {
        auto next = cur;
        bool changed = false;
        for (const auto& [id, s] : cur) {
            const double v = decay * s;
            const auto& n = nodes_.at(id);
            auto push = [&](NodeId to) {
                auto [slot, inserted] = next.try_emplace(to, v);
                if (inserted) {
                    changed = true;
                } else if (slot->second < v) {
                    slot->second = v;
                    changed = true;
                }
            };
            for (EdgeId e : n.out) push(edges_.at(e).dst);
            for (EdgeId e : n.in) push(edges_.at(e).src);
        }
        cur = std::move(next);
        if (!changed) break;
    }
    for (const auto& [id, s] : cur) {
        auto& n = nodes_.at(id);
        n.score = std::max(n.score, s);
    }
}

std::vector<Candidate> ProvGraph::candidates(double floor) const {
    std::vector<NodeId> eligible;
    for (const auto& [id, n] : nodes_)
        if (n.score >= floor) eligible.push_back(id);
    std::sort(eligible.begin(), eligible.end());

    std::unordered_set<NodeId> in_set(eligible.begin(), eligible.end()), visited;
    std::vector<Candidate> out;
    for (NodeId start : eligible) {
        if (visited.count(start)) continue;
        Candidate c;
        std::vector<NodeId> stack{start};
        visited.insert(start);
        while (!stack.empty()) {
            const auto id = stack.back();
            stack.pop_back();
            const auto& n = nodes_.at(id);
            c.nodes.push_back(id);
            c.total_score += n.score;
            auto visit = [&](NodeId to) {
                if (in_set.count(to) && visited.insert(to).second) stack.push_back(to);
            };
            for (EdgeId e : n.out) visit(edges_.at(e).dst);
            for (EdgeId e : n.in) visit(edges_.at(e).src);
        }
        std::sort(c.nodes.begin(), c.nodes.end());
        out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.total_score != b.total_score) return a.total_score > b.total_score;
        return a.nodes.front() < b.nodes.front();
    });
    return out;
}

std::size_t ProvGraph::evict(std::int64_t now, double floor) {
    const std::int64_t horizon = now - opts_.window;
    std::unordered_set<NodeId> gone;
    for (const auto& [id, n] : nodes_)
        if (n.last_ts < horizon && n.score < floor && n.seed_score < floor) gone.insert(id);
    remove_nodes(gone);
    return gone.size();
}

std::vector<std::string> ProvGraph::retire(std::int64_t now) {
    const std::int64_t horizon = now - opts_.window;
    std::unordered_set<NodeId> gone;
    std::vector<std::string> keys;
    for (const auto& [id, n] : nodes_)
        if (n.last_ts < horizon) {
            gone.insert(id);
            keys.push_back(n.key);
        }
    remove_nodes(gone);
    std::sort(keys.begin(), keys.end());
    return keys;
}

void ProvGraph::remove_nodes(const std::unordered_set<NodeId>& gone) {
    if (gone.empty()) return;
    std::unordered_set<NodeId> touched;
    for (NodeId id : gone) {
        const auto& n = nodes_.at(id);
        for (const auto* list : {&n.out, &n.in}) {
            for (EdgeId eid : *list) {
                auto it = edges_.find(eid);
                if (it == edges_.end()) continue;
                const auto& e = it->second;
                touched.insert(e.src == id ? e.dst : e.src);
                edge_index_.erase(EdgeKey{e.src, e.dst, e.syscall});
                edges_.erase(it);
            }
        }
    }
    for (NodeId id : gone) {
        by_key_.erase(nodes_.at(id).key);
        nodes_.erase(id);
    }
    for (NodeId id : touched) {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) continue;
        auto dead = [&](EdgeId e) { return !edges_.count(e); };
        std::erase_if(it->second.out, dead);
        std::erase_if(it->second.in, dead);
    }
}

Subgraph ProvGraph::extract(std::span<const NodeId> ids) const {
    Subgraph g;
    std::unordered_set<NodeId> keep(ids.begin(), ids.end());
    std::set<EdgeId> edge_ids;
    for (NodeId id : keep) {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) throw LookupError("node " + std::to_string(id) + " is not in the graph");
        for (EdgeId e : it->second.out)
            if (keep.count(edges_.at(e).dst)) edge_ids.insert(e);
    }
    for (EdgeId e : edge_ids) g.edges.push_back(edges_.at(e));
    for (NodeId id : keep) {
        ProvNode n = nodes_.at(id);
        std::erase_if(n.out, [&](EdgeId e) { return !edge_ids.count(e); });
        std::erase_if(n.in, [&](EdgeId e) { return !edge_ids.count(e); });
        std::sort(n.out.begin(), n.out.end());
        std::sort(n.in.begin(), n.in.end());
        g.nodes.push_back(std::move(n));
    }
    std::sort(g.nodes.begin(), g.nodes.end(), [](const ProvNode& a, const ProvNode& b) { return a.id < b.id; });
    return g;
}

Subgraph merge(const Subgraph& older, const Subgraph& newer) {
    std::unordered_map<std::string, NodeId> by_key;
    for (const auto& n : newer.nodes) by_key.emplace(n.key, n.id);
    std::unordered_map<NodeId, NodeId> remap;
    for (const auto& n : older.nodes)
        if (auto it = by_key.find(n.key); it != by_key.end()) remap[n.id] = it->second;
    auto to = [&](NodeId id) {
        auto it = remap.find(id);
        return it == remap.end() ? id : it->second;
    };

    Subgraph g;
    std::map<NodeId, ProvNode> nodes;
    for (const auto& n : older.nodes)
        if (!remap.count(n.id)) nodes.emplace(n.id, n);
    for (const auto& n : newer.nodes) {
        auto& slot = nodes[n.id] = n;
        if (auto it = std::find_if(older.nodes.begin(), older.nodes.end(),
                                   [&](const ProvNode& o) { return o.key == n.key; });
            it != older.nodes.end()) {
            slot.first_ts = std::min(slot.first_ts, it->first_ts);
            slot.score = std::max(slot.score, it->score);
            slot.seed_score = std::max(slot.seed_score, it->seed_score);
        }
    }

    std::map<EdgeId, ProvEdge> edges;
    std::map<std::tuple<NodeId, NodeId, std::string>, EdgeId> by_triple;
    for (const auto& e : newer.edges) {
        edges.emplace(e.id, e);
        by_triple.emplace(std::make_tuple(e.src, e.dst, e.syscall), e.id);
    }
    for (auto e : older.edges) {
        if (edges.count(e.id)) continue;
        e.src = to(e.src);
        e.dst = to(e.dst);
        auto [it, fresh] = by_triple.emplace(std::make_tuple(e.src, e.dst, e.syscall), e.id);
        if (fresh) {
            edges.emplace(e.id, std::move(e));
            continue;
        }
        auto& into = edges.at(it->second);
        if (e.first_ts < into.first_ts) {
            into.first_ts = e.first_ts;
            into.cmdline = e.cmdline;
        }
        into.last_ts = std::max(into.last_ts, e.last_ts);
        into.count += e.count;
        for (const auto& m : e.matches) {
            auto pos = std::lower_bound(into.matches.begin(), into.matches.end(), m.technique,
                                        [](const EdgeMatch& x, const std::string& t) { return x.technique < t; });
            if (pos != into.matches.end() && pos->technique == m.technique)
                pos->score = std::max(pos->score, m.score);
            else
                into.matches.insert(pos, m);
        }
        if (e.first_match_ts && (!into.first_match_ts || *e.first_match_ts < *into.first_match_ts))
            into.first_match_ts = e.first_match_ts;
    }

    for (auto& [_, n] : nodes) {
        n.out.clear();
        n.in.clear();
    }
    for (const auto& [id, e] : edges) {
        nodes.at(e.src).out.push_back(id);
        nodes.at(e.dst).in.push_back(id);
        g.edges.push_back(e);
    }
    for (auto& [_, n] : nodes) g.nodes.push_back(std::move(n));
    return g;
}

const ProvNode* ProvGraph::node(NodeId id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
}

const ProvNode* ProvGraph::find(std::string_view key) const {
    auto it = by_key_.find(std::string(key));
    return it == by_key_.end() ? nullptr : node(it->second);
}

const ProvEdge* ProvGraph::edge(EdgeId id) const {
    auto it = edges_.find(id);
    return it == edges_.end() ? nullptr : &it->second;
}

json to_jgf(const Subgraph& g) {
    json nodes = json::object();
    for (const auto& n : g.nodes) {
        json meta = {{"id", n.id},
                     {"host", n.host},
                     {"kind", lifting::to_string(n.kind)},
                     {"value", n.value},
                     {"score", n.score},
                     {"seed_score", n.seed_score},
                     {"first_ts", n.first_ts},
                     {"last_ts", n.last_ts},
                     {"stages", n.stage_labels}};
        if (!n.image.empty()) meta["image"] = n.image;
        nodes[n.key] = {{"label", n.value}, {"metadata", meta}};
    }
    json edges = json::array();
    for (const auto& e : g.edges) {
        json matches = json::array();
        for (const auto& m : e.matches) matches.push_back({{"technique", m.technique}, {"score", m.score}});
        json meta = {{"id", e.id},
                     {"first_ts", e.first_ts},
                     {"last_ts", e.last_ts},
                     {"count", e.count},
                     {"cmdline", e.cmdline},
                     {"matches", matches}};
        if (e.first_match_ts) meta["first_match_ts"] = *e.first_match_ts;
        edges.push_back({{"source", g.node(e.src)->key},
                         {"target", g.node(e.dst)->key},
                         {"relation", e.syscall},
                         {"directed", true},
                         {"metadata", meta}});
    }
    return {{"graph", {{"directed", true}, {"type", "provenance"}, {"nodes", nodes}, {"edges", edges}}}};
}

Subgraph from_jgf(const json& j) {
    Subgraph g;
    try {
        const auto& gr = j.at("graph");
        std::unordered_map<std::string, NodeId> ids;
        for (const auto& [key, v] : gr.at("nodes").items()) {
            const auto& m = v.at("metadata");
            ProvNode n;
            n.id = m.at("id").get<NodeId>();
            n.key = key;
            n.host = m.value("host", "");
            n.kind = lifting::object_kind_from_string(m.at("kind").get<std::string>());
            n.value = m.value("value", v.value("label", ""));
            n.image = m.value("image", "");
            n.score = m.value("score", 0.0);
            n.seed_score = m.value("seed_score", 0.0);
            n.first_ts = m.value("first_ts", std::int64_t{0});
            n.last_ts = m.value("last_ts", std::int64_t{0});
            n.stage_labels = m.value("stages", std::set<std::string>{});
            ids[key] = n.id;
            g.nodes.push_back(std::move(n));
        }
        std::sort(g.nodes.begin(), g.nodes.end(), [](const ProvNode& a, const ProvNode& b) { return a.id < b.id; });
        for (const auto& v : gr.at("edges")) {
            const auto& m = v.at("metadata");
            ProvEdge e;
            e.id = m.at("id").get<EdgeId>();
            e.src = ids.at(v.at("source").get<std::string>());
            e.dst = ids.at(v.at("target").get<std::string>());
            e.syscall = v.value("relation", "");
            e.cmdline = m.value("cmdline", "");
            e.first_ts = m.value("first_ts", std::int64_t{0});
            e.last_ts = m.value("last_ts", std::int64_t{0});
            e.count = m.value("count", std::uint64_t{0});
            for (const auto& x : m.value("matches", json::array()))
                e.matches.push_back({x.at("technique").get<std::string>(), x.at("score").get<double>()});
            if (m.contains("first_match_ts")) e.first_match_ts = m["first_match_ts"].get<std::int64_t>();
            g.edges.push_back(std::move(e));
        }
        std::sort(g.edges.begin(), g.edges.end(), [](const ProvEdge& a, const ProvEdge& b) { return a.id < b.id; });
        std::unordered_map<NodeId, std::size_t> pos;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) pos[g.nodes[i].id] = i;
        for (const auto& e : g.edges) {
            g.nodes[pos.at(e.src)].out.push_back(e.id);
            g.nodes[pos.at(e.dst)].in.push_back(e.id);
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed graph document: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw SchemaError("graph edge references an unknown node");
    }
    return g;
}

}  // namespace apthunt::graph

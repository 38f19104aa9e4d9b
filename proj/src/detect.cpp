#include "apthunt/detect.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <spdlog/spdlog.h>
#include <thread>
#include <unordered_map>

#include "apthunt/errors.hpp"
#include "apthunt/util.hpp"

namespace apthunt::detect {

using nlohmann::json;

struct Detector::Worker {
    std::unordered_map<std::string, std::vector<index::Hit>> cache;
};

namespace {

// Runs fn(i) for i in [0, n) over at most `threads` threads in contiguous
// slices; slice 0 runs on the caller.
template <class Fn>
void parallel_slices(std::size_t n, std::size_t threads, Fn fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(0, i);
        return;
    }
    const std::size_t per = (n + threads - 1) / threads;
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t * per; i < std::min(n, (t + 1) * per); ++i) fn(t, i);
        });
    for (std::size_t i = 0; i < std::min(n, per); ++i) fn(0, i);
}

std::size_t resolve_workers(std::size_t w) {
    if (w) return w;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

Detector::Detector(const amid::AmidStore& store, const reasoning::TacticMap& tactics, lifting::DnsMap dns,
                   lifting::LiftRules rules, DetectOptions opts, Sink sink)
    : store_(store),
      tactics_(tactics),
      dns_(std::move(dns)),
      rules_(std::move(rules)),
      opts_(std::move(opts)),
      sink_(std::move(sink)),
      theta_q_(store.theta_q()),
      floor_(opts_.floor.value_or(theta_q_)),
      graph_(opts_.graph) {
    if (opts_.checkpoint_interval <= 0) throw InputError("checkpoint interval must be positive");
    if (opts_.batch == 0) opts_.batch = 1;
    const auto n = resolve_workers(opts_.workers);
    for (std::size_t i = 0; i < n; ++i) workers_.push_back(std::make_unique<Worker>());
    pending_.reserve(opts_.batch);
}

Detector::~Detector() = default;

std::vector<amid::MatchResult> Detector::match(const lifting::RawEvent& e, Worker& w) const {
    const auto lifted = lifting::lift_event(e, dns_, rules_);
    std::map<lifting::Field, std::vector<index::Hit>> hits;
    for (const auto& [field, phrase] : lifted.lifted) {
        std::string key(1, static_cast<char>('0' + static_cast<int>(field)));
        key += util::join(phrase);
        auto it = w.cache.find(key);
        if (it == w.cache.end()) {
            if (w.cache.size() >= opts_.cache_entries) w.cache.clear();
            it = w.cache.emplace(std::move(key), store_.field_hits(field, phrase)).first;
        }
        hits[field] = it->second;
    }
    return amid::select_matches(store_.aggregate(hits), theta_q_);
}

void Detector::push(lifting::RawEvent event) {
    if (finished_) throw StateError("detector already finished");
    pending_.push_back(std::move(event));
    if (pending_.size() >= opts_.batch) flush();
}

void Detector::reject(std::size_t line, const std::string& message) {
    ++stats_.errors;
    sink_({{"type", "quarantine"}, {"line", line}, {"reason", message}});
}

void Detector::flush() {
    if (pending_.empty()) return;
    std::vector<std::vector<amid::MatchResult>> matches(pending_.size());
    std::vector<std::string> errors(pending_.size());
    parallel_slices(pending_.size(), workers_.size(), [&](std::size_t w, std::size_t i) {
        try {
            matches[i] = match(pending_[i], *workers_[w]);
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    });

    for (std::size_t i = 0; i < pending_.size(); ++i) {
        const auto& e = pending_[i];
        if (!next_checkpoint_) next_checkpoint_ = e.ts + opts_.checkpoint_interval;
        if (e.ts >= *next_checkpoint_) {
            checkpoint(*next_checkpoint_, false);
            const auto gap = e.ts - *next_checkpoint_;
            *next_checkpoint_ += opts_.checkpoint_interval * (1 + gap / opts_.checkpoint_interval);
        }
        ++stats_.events;
        if (!errors[i].empty()) {
            ++stats_.errors;
            sink_({{"type", "quarantine"}, {"ts", e.ts}, {"host", e.host}, {"reason", errors[i]}});
        }
        if (!matches[i].empty()) ++stats_.matched_events;
        if (graph_.ingest(e, matches[i]) == graph::IngestStatus::quarantined) {
            ++stats_.quarantined;
            sink_({{"type", "quarantine"}, {"ts", e.ts}, {"host", e.host}, {"reason", "out of order"}});
        } else {
            last_ts_ = std::max(last_ts_, e.ts);
        }
    }
    stats_.peak_nodes = std::max(stats_.peak_nodes, graph_.node_count());
    stats_.peak_edges = std::max(stats_.peak_edges, graph_.edge_count());
    pending_.clear();
}

void Detector::checkpoint(std::int64_t now, bool final) {
    ++stats_.checkpoints;
    graph_.propagate(opts_.decay, opts_.hops);
    const auto cands = graph_.candidates(floor_);

    struct Outcome {
        graph::Subgraph sub;
        reasoning::CandidateLifecycle lc;
        reasoning::Decision decision;
    };
    auto reason = [&](Outcome& o) {
        o.lc = reasoning::streamline(reasoning::build_lifecycle(o.sub, tactics_, opts_.reasoning));
        o.decision = reasoning::raise_alert(o.lc);
        for (auto& n : o.sub.nodes) {
            n.stage_labels.clear();
            if (auto it = o.lc.node_stages.find(n.id); it != o.lc.node_stages.end())
                for (auto s : it->second) n.stage_labels.insert(std::string(reasoning::to_string(s)));
        }
    };
    std::vector<Outcome> out(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) out[i].sub = graph_.extract(cands[i].nodes);
    parallel_slices(cands.size(), workers_.size(), [&](std::size_t, std::size_t i) { reason(out[i]); });

    std::vector<std::size_t> changed;  // alerts to report on
    for (auto& o : out) {
        std::set<std::string> keys;
        for (const auto& n : o.sub.nodes) keys.insert(n.key);
        std::optional<std::size_t> overlap;
        for (const auto& k : keys)
            if (auto it = alert_of_key_.find(k); it != alert_of_key_.end()) {
                overlap = it->second;
                break;
            }

        if (overlap) {
            // grow the alert; nodes that already left the graph stay in it
            auto& old = alerts_[*overlap];
            Outcome m;
            m.sub = graph::merge(old.subgraph, o.sub);
            reason(m);
            for (const auto& k : keys) alert_of_key_[k] = *overlap;
            if (!m.decision.alert) continue;
            reasoning::Alert a;
            a.id = old.id;
            a.revision = old.revision;
            a.created_ts = old.created_ts;
            a.lifecycle = std::move(m.lc);
            a.rationale = m.decision.rationale;
            a.subgraph = std::move(m.sub);
            if (reasoning::alert_to_json(a) == reasoning::alert_to_json(old)) continue;
            a.revision = old.revision + 1;
            old = std::move(a);
            ++stats_.alert_updates;
            auto j = reasoning::alert_to_json(old);
            j["ts"] = now;
            sink_(j);
            changed.push_back(*overlap);
            continue;
        }
        if (o.decision.alert) {
            reasoning::Alert a;
            a.lifecycle = std::move(o.lc);
            a.rationale = o.decision.rationale;
            a.created_ts = now;
            a.subgraph = std::move(o.sub);
            char id[24];
            std::snprintf(id, sizeof id, "A%04zu", alerts_.size() + 1);
            a.id = id;
            alerts_.push_back(std::move(a));
            for (const auto& k : keys) alert_of_key_.emplace(k, alerts_.size() - 1);
            ++stats_.alerts;
            sink_(reasoning::alert_to_json(alerts_.back()));
            changed.push_back(alerts_.size() - 1);
            continue;
        }
        std::string sig;
        for (const auto& k : keys) sig += k + "\n";
        for (auto s : o.lc.stages()) sig += std::string(reasoning::short_name(s)) + ",";
        if (!suppressed_.insert(sig).second) continue;
        if (suppressed_.size() > 100000) suppressed_.clear();
        ++stats_.suppressions;
        sink_(reasoning::suppression_to_json(o.lc, o.sub, o.decision, now));
    }

    if (opts_.reports && !changed.empty()) {
        std::sort(changed.begin(), changed.end());
        changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
        const auto& ex = opts_.exemplars ? *opts_.exemplars : std::vector<report::Exemplar>{};
        std::vector<json> reports(changed.size());
        parallel_slices(changed.size(), opts_.report_concurrency, [&](std::size_t, std::size_t i) {
            const auto& a = alerts_[changed[i]];
            auto r = report::build_report(a, opts_.client, opts_.second_opinion, ex);
            auto j = report::to_json(r);
            j["revision"] = a.revision;
            reports[i] = std::move(j);
        });
        for (auto& r : reports) sink_(r);
    }

    graph_.evict(now, floor_);
    for (const auto& k : graph_.retire(now)) alert_of_key_.erase(k);
    if (final) spdlog::debug("final checkpoint at {}", now);
}

void Detector::finish() {
    if (finished_) return;
    flush();
    checkpoint(last_ts_, true);
    finished_ = true;
}

}  // namespace apthunt::detect

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "apthunt/amid.hpp"
#include "apthunt/graph.hpp"
#include "apthunt/lifting.hpp"
#include "apthunt/reasoning.hpp"
#include "apthunt/report.hpp"
#include "json.hpp"

namespace apthunt::detect {

struct DetectOptions {
    double decay = 0.5;
    int hops = 3;
    std::optional<double> floor;  // theta_q when unset
    graph::GraphOptions graph;
    std::int64_t checkpoint_interval = 3600 * graph::kNsPerSecond;
    std::size_t workers = 0;  // 0: hardware concurrency
    std::size_t batch = 2048;
    std::size_t cache_entries = 1 << 16;  // per worker
    reasoning::ReasoningOptions reasoning;

    bool reports = true;
    report::TextClient* client = nullptr;  // template text when null
    bool second_opinion = false;
    std::size_t report_concurrency = 2;
    const std::vector<report::Exemplar>* exemplars = nullptr;
};

struct DetectStats {
    std::size_t events = 0;
    std::size_t matched_events = 0;
    std::size_t quarantined = 0;
    std::size_t errors = 0;
    std::size_t alerts = 0;
    std::size_t alert_updates = 0;
    std::size_t suppressions = 0;
    std::size_t checkpoints = 0;
    std::size_t peak_nodes = 0;
    std::size_t peak_edges = 0;
};

// Receives every output record (alerts, updates, suppressions, reports,
// quarantine notes) in emission order.
using Sink = std::function<void(const nlohmann::json&)>;

// Streaming pipeline: lift -> match -> ingest, and at every checkpoint
// propagate -> candidates -> stages -> streamline -> alert -> report -> evict.
class Detector {
public:
    Detector(const amid::AmidStore& store, const reasoning::TacticMap& tactics, lifting::DnsMap dns,
             lifting::LiftRules rules, DetectOptions opts, Sink sink);
    ~Detector();
    Detector(const Detector&) = delete;
    Detector& operator=(const Detector&) = delete;

    void push(lifting::RawEvent event);
    // A line that could not be parsed.
    void reject(std::size_t line, const std::string& message);
    // Drains buffered events and runs the final checkpoint.
    void finish();

    const DetectStats& stats() const noexcept { return stats_; }
    // Latest revision of every alert raised so far.
    const std::vector<reasoning::Alert>& alerts() const noexcept { return alerts_; }
    const graph::ProvGraph& graph() const noexcept { return graph_; }
    double floor() const noexcept { return floor_; }

private:
    struct Worker;
    void flush();
    void checkpoint(std::int64_t now, bool final);
    std::vector<amid::MatchResult> match(const lifting::RawEvent& e, Worker& w) const;

    const amid::AmidStore& store_;
    const reasoning::TacticMap& tactics_;
    lifting::DnsMap dns_;
    lifting::LiftRules rules_;
    DetectOptions opts_;
    Sink sink_;
    double theta_q_;
    double floor_;
    graph::ProvGraph graph_;
    std::vector<lifting::RawEvent> pending_;
    std::vector<std::unique_ptr<Worker>> workers_;
    std::optional<std::int64_t> next_checkpoint_;
    std::int64_t last_ts_ = 0;
    std::vector<reasoning::Alert> alerts_;
    std::unordered_map<std::string, std::size_t> alert_of_key_;  // node key -> alerts_ index
    std::set<std::string> suppressed_;
    DetectStats stats_;
    bool finished_ = false;
};

}  // namespace apthunt::detect

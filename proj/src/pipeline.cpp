#include "apthunt/pipeline.hpp"

#include <spdlog/spdlog.h>

#include "apthunt/errors.hpp"
#include "apthunt/event_io.hpp"

namespace apthunt::pipeline {

Engine load_engine(const config::Config& cfg) {
    Engine e{cfg, nullptr, {}, {}};
    if (cfg.paths.vectors.empty()) throw ConfigError("paths.vectors is not set");
    e.table = std::make_shared<embedding::VectorTable>(embedding::load_vectors(cfg.paths.vectors));
    e.rules = cfg.paths.lifting_rules.empty() ? lifting::LiftRules::defaults()
                                              : lifting::LiftRules::load(cfg.paths.lifting_rules);
    if (!cfg.paths.dns_map.empty()) e.dns = lifting::DnsMap::load(cfg.paths.dns_map);
    return e;
}

amid::StoreOptions store_options(const config::Config& c) {
    amid::StoreOptions o;
    o.theta_hit = c.matching.theta_hit;
    o.search_mode = c.matching.search_mode == "exact" ? index::SearchMode::exact : index::SearchMode::nearest_cluster;
    o.index.bandwidth = c.matching.bandwidth;
    o.index.rule = c.matching.bandwidth_rule == "median_pairwise" ? index::BandwidthRule::median_pairwise
                                                                   : index::BandwidthRule::hit_radius;
    o.index.theta_hit = c.matching.theta_hit;
    o.index.bandwidth_quantile = c.matching.bandwidth_quantile;
    o.index.mean_shift.max_seeds = c.matching.max_seeds;
    return o;
}

detect::DetectOptions detect_options(const config::Config& c) {
    detect::DetectOptions o;
    o.decay = c.graph.decay;
    o.hops = c.graph.hops;
    o.floor = c.graph.floor;
    o.graph.window = event_io::seconds_to_ns(c.graph.window_s);
    o.graph.out_of_order_tolerance = event_io::seconds_to_ns(c.graph.tolerance_s);
    o.checkpoint_interval = event_io::seconds_to_ns(c.detect.checkpoint_s);
    o.workers = c.detect.workers;
    o.batch = c.detect.batch;
    o.cache_entries = c.detect.cache_entries;
    o.reasoning.alpha = c.matching.alpha;
    o.reports = c.report.enabled;
    o.second_opinion = c.report.second_opinion;
    o.report_concurrency = c.report.concurrency;
    return o;
}

std::vector<lifting::LiftedEvent> read_lifted(std::istream& in, const Engine& e, const std::string& label) {
    event_io::EventReader reader(in);
    std::vector<lifting::LiftedEvent> out;
    while (auto ev = reader.next()) {
        if (reader.last_error()) {
            spdlog::warn("{}:{}: {}", label, reader.last_error()->line, reader.last_error()->message);
            continue;
        }
        out.push_back(lifting::lift_event(*ev, e.dns, e.rules));
    }
    return out;
}

void run(detect::Detector& det, std::istream& in) {
    event_io::EventReader reader(in);
    while (auto ev = reader.next()) {
        if (reader.last_error())
            det.reject(reader.last_error()->line, reader.last_error()->message);
        else
            det.push(std::move(*ev));
    }
    det.finish();
}

}  // namespace apthunt::pipeline

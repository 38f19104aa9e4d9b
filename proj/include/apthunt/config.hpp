#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

namespace apthunt::config {

struct Paths {
    std::string amid;
    std::string vectors;
    std::string dns_map;
    std::string lifting_rules;  // empty: built-in table
    std::string tactic_table;   // empty: bundled ATT&CK subset
    std::string exemplars;      // empty: bundled report excerpts
};

struct Matching {
    double theta_hit = 0.75;
    std::optional<double> theta_q;  // overrides the AMID header
    double alpha = 0.05;
    std::string search_mode = "exact";  // or nearest_cluster
    double bandwidth = 0.0;             // <= 0: estimated
    std::string bandwidth_rule = "hit_radius";  // or median_pairwise
    double bandwidth_quantile = 0.5;
    std::size_t max_seeds = 2048;
};

struct Graph {
    double decay = 0.5;
    int hops = 3;
    std::optional<double> floor;  // defaults to theta_q
    double window_s = 24 * 3600.0;
    double tolerance_s = 5.0;
};

struct Detect {
    double checkpoint_s = 3600.0;
    std::size_t workers = 0;  // 0: hardware concurrency
    std::size_t batch = 2048;
    std::size_t cache_entries = 1 << 16;
};

struct Report {
    bool enabled = true;
    std::string client = "template";  // template, http or replay
    std::string endpoint;
    std::string model;
    int timeout_ms = 30000;
    std::string api_key_env = "APTHUNT_LLM_API_KEY";
    std::string replay_file;
    bool second_opinion = false;
    std::size_t concurrency = 2;
};

struct Config {
    Paths paths;
    Matching matching;
    Graph graph;
    Detect detect;
    Report report;
    std::string log_level = "info";

    void validate() const;  // throws ConfigError
};

nlohmann::json to_json(const Config& c);
Config from_json(const nlohmann::json& j);  // unknown keys are a ConfigError

// Reads the file (if given), then applies APTHUNT_<SECTION>_<KEY> variables,
// e.g. APTHUNT_MATCHING_THETA_HIT=0.8. Relative paths in the file resolve
// against its directory.
Config load(const std::optional<std::filesystem::path>& file);
Config apply_env(Config c);

// Config plus content hashes of the AMID and vector table.
nlohmann::json manifest(const Config& c, double theta_q);

}  // namespace apthunt::config

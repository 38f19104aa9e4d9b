#include "apthunt/config.hpp"

#include <cstdlib>
#include <filesystem>

#include "apthunt/errors.hpp"
#include "apthunt/util.hpp"

namespace apthunt::config {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null())
        out.reset();
    else
        out = j.at(key).get<T>();
}

void check_keys(const json& j, const json& reference, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        if (!reference.contains(k)) throw ConfigError("unknown config key " + where + k);
        if (reference[k].is_object()) check_keys(v, reference[k], where + k + ".");
    }
}

std::string hash_file(const std::string& path) {
    if (path.empty()) return "";
    try {
        return "sha256:" + util::sha256_hex(util::read_file(path));
    } catch (const std::exception&) {
        return "";
    }
}

}  // namespace

json to_json(const Config& c) {
    return {{"paths",
             {{"amid", c.paths.amid},
              {"vectors", c.paths.vectors},
              {"dns_map", c.paths.dns_map},
              {"lifting_rules", c.paths.lifting_rules},
              {"tactic_table", c.paths.tactic_table},
              {"exemplars", c.paths.exemplars}}},
            {"matching",
             {{"theta_hit", c.matching.theta_hit},
              {"theta_q", opt(c.matching.theta_q)},
              {"alpha", c.matching.alpha},
              {"search_mode", c.matching.search_mode},
              {"bandwidth", c.matching.bandwidth},
              {"bandwidth_rule", c.matching.bandwidth_rule},
              {"bandwidth_quantile", c.matching.bandwidth_quantile},
              {"max_seeds", c.matching.max_seeds}}},
            {"graph",
             {{"decay", c.graph.decay},
              {"hops", c.graph.hops},
              {"floor", opt(c.graph.floor)},
              {"window_s", c.graph.window_s},
              {"tolerance_s", c.graph.tolerance_s}}},
            {"detect",
             {{"checkpoint_s", c.detect.checkpoint_s},
              {"workers", c.detect.workers},
              {"batch", c.detect.batch},
              {"cache_entries", c.detect.cache_entries}}},
            {"report",
             {{"enabled", c.report.enabled},
              {"client", c.report.client},
              {"endpoint", c.report.endpoint},
              {"model", c.report.model},
              {"timeout_ms", c.report.timeout_ms},
              {"api_key_env", c.report.api_key_env},
              {"replay_file", c.report.replay_file},
              {"second_opinion", c.report.second_opinion},
              {"concurrency", c.report.concurrency}}},
            {"log_level", c.log_level}};
}

Config from_json(const json& j) {
    Config c;
    check_keys(j, to_json(c), "");
    try {
        if (j.contains("paths")) {
            const auto& p = j["paths"];
            read(p, "amid", c.paths.amid);
            read(p, "vectors", c.paths.vectors);
            read(p, "dns_map", c.paths.dns_map);
            read(p, "lifting_rules", c.paths.lifting_rules);
            read(p, "tactic_table", c.paths.tactic_table);
            read(p, "exemplars", c.paths.exemplars);
        }
        if (j.contains("matching")) {
            const auto& m = j["matching"];
            read(m, "theta_hit", c.matching.theta_hit);
            read(m, "theta_q", c.matching.theta_q);
            read(m, "alpha", c.matching.alpha);
            read(m, "search_mode", c.matching.search_mode);
            read(m, "bandwidth", c.matching.bandwidth);
            read(m, "bandwidth_rule", c.matching.bandwidth_rule);
            read(m, "bandwidth_quantile", c.matching.bandwidth_quantile);
            read(m, "max_seeds", c.matching.max_seeds);
        }
        if (j.contains("graph")) {
            const auto& g = j["graph"];
            read(g, "decay", c.graph.decay);
            read(g, "hops", c.graph.hops);
            read(g, "floor", c.graph.floor);
            read(g, "window_s", c.graph.window_s);
            read(g, "tolerance_s", c.graph.tolerance_s);
        }
        if (j.contains("detect")) {
            const auto& d = j["detect"];
            read(d, "checkpoint_s", c.detect.checkpoint_s);
            read(d, "workers", c.detect.workers);
            read(d, "batch", c.detect.batch);
            read(d, "cache_entries", c.detect.cache_entries);
        }
        if (j.contains("report")) {
            const auto& r = j["report"];
            read(r, "enabled", c.report.enabled);
            read(r, "client", c.report.client);
            read(r, "endpoint", c.report.endpoint);
            read(r, "model", c.report.model);
            read(r, "timeout_ms", c.report.timeout_ms);
            read(r, "api_key_env", c.report.api_key_env);
            read(r, "replay_file", c.report.replay_file);
            read(r, "second_opinion", c.report.second_opinion);
            read(r, "concurrency", c.report.concurrency);
        }
        read(j, "log_level", c.log_level);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

void Config::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (!(matching.theta_hit >= -1.0 && matching.theta_hit <= 1.0)) fail("matching.theta_hit must lie in [-1, 1]");
    if (matching.theta_q && !(*matching.theta_q >= 0.0)) fail("matching.theta_q must be >= 0");
    if (!(matching.alpha > 0.0 && matching.alpha <= 0.5)) fail("matching.alpha must lie in (0, 0.5]");
    if (matching.search_mode != "exact" && matching.search_mode != "nearest_cluster")
        fail("matching.search_mode must be exact or nearest_cluster");
    if (!(matching.bandwidth_quantile > 0.0 && matching.bandwidth_quantile <= 1.0))
        fail("matching.bandwidth_quantile must lie in (0, 1]");
    if (matching.bandwidth_rule != "hit_radius" && matching.bandwidth_rule != "median_pairwise")
        fail("matching.bandwidth_rule must be hit_radius or median_pairwise");
    if (matching.max_seeds == 0) fail("matching.max_seeds must be positive");
    if (!(graph.decay > 0.0 && graph.decay < 1.0)) fail("graph.decay must lie in (0, 1)");
    if (graph.hops < 0) fail("graph.hops must be >= 0");
    if (graph.floor && !(*graph.floor >= 0.0)) fail("graph.floor must be >= 0");
    if (!(graph.window_s > 0.0)) fail("graph.window_s must be positive");
    if (!(graph.tolerance_s >= 0.0)) fail("graph.tolerance_s must be >= 0");
    if (!(detect.checkpoint_s > 0.0)) fail("detect.checkpoint_s must be positive");
    if (detect.batch == 0) fail("detect.batch must be positive");
    if (report.client != "template" && report.client != "http" && report.client != "replay")
        fail("report.client must be template, http or replay");
    if (report.client == "http" && report.endpoint.empty()) fail("report.endpoint is required for the http client");
    if (report.client == "replay" && report.replay_file.empty())
        fail("report.replay_file is required for the replay client");
    if (report.timeout_ms <= 0) fail("report.timeout_ms must be positive");
    if (report.concurrency == 0) fail("report.concurrency must be positive");
}

Config apply_env(Config c) {
    json j = to_json(c);
    for (auto& [section, body] : j.items()) {
        auto apply = [&](const std::string& name, json& slot) {
            std::string var = "APTHUNT_" + name;
            for (auto& ch : var) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            const char* v = std::getenv(var.c_str());
            if (!v) return;
            if (slot.is_string()) {
                slot = std::string(v);
                return;
            }
            try {
                slot = json::parse(v);
            } catch (const json::parse_error&) {
                throw ConfigError(var + " is not a valid value: " + v);
            }
        };
        if (body.is_object()) {
            for (auto& [key, slot] : body.items()) apply(section + "_" + key, slot);
        } else {
            apply(section, body);
        }
    }
    return from_json(j);
}

Config load(const std::optional<std::filesystem::path>& file) {
    Config c;
    if (file) {
        json j;
        try {
            j = json::parse(util::read_file(*file));
        } catch (const json::parse_error& e) {
            throw ConfigError(file->string() + ": " + e.what());
        } catch (const DependencyError& e) {
            throw ConfigError(e.what());
        }
        c = from_json(j);
        const auto base = file->parent_path();
        for (auto* p : {&c.paths.amid, &c.paths.vectors, &c.paths.dns_map, &c.paths.lifting_rules,
                        &c.paths.tactic_table, &c.paths.exemplars, &c.report.replay_file})
            if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
    }
    return apply_env(std::move(c));
}

json manifest(const Config& c, double theta_q) {
    return {{"type", "manifest"},
            {"tool", "apthunt"},
            {"config", to_json(c)},
            {"theta_q", theta_q},
            {"amid_sha256", hash_file(c.paths.amid)},
            {"vectors_sha256", hash_file(c.paths.vectors)}};
}

}  // namespace apthunt::config

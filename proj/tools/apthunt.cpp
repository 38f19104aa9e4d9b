#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "apthunt/amid.hpp"
#include "apthunt/config.hpp"
#include "apthunt/detect.hpp"
#include "apthunt/errors.hpp"
#include "apthunt/eval.hpp"
#include "apthunt/pipeline.hpp"
#include "apthunt/event_io.hpp"
#include "apthunt/report.hpp"
#include "apthunt/util.hpp"

using namespace apthunt;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kDetectionError = 1;
constexpr int kConfigError = 2;

using pipeline::Engine;
using pipeline::load_engine;
using pipeline::store_options;

std::vector<lifting::LiftedEvent> read_lifted(const std::string& path, const Engine& e) {
    std::ifstream in(path);
    if (!in) throw DependencyError("cannot open " + path);
    return pipeline::read_lifted(in, e, path);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DependencyError("cannot write " + path);
    out << text;
}

std::vector<json> read_jsonl(const std::string& path) {
    std::vector<json> out;
    std::size_t n = 0;
    for (const auto& line : util::split(util::read_file(path), '\n')) {
        ++n;
        if (util::trim(line).empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw FormatError(path + ": " + e.what(), n);
        }
    }
    return out;
}

// Latest revision of every alert in an output stream.
std::map<std::string, json> latest_alerts(const std::vector<json>& records) {
    std::map<std::string, json> out;
    for (const auto& r : records) {
        const auto type = r.value("type", "");
        if (type != "alert" && type != "alert_update") continue;
        auto& slot = out[r.at("id").get<std::string>()];
        if (slot.is_null() || slot.value("revision", 0) <= r.value("revision", 0)) slot = r;
    }
    return out;
}

std::unique_ptr<report::TextClient> make_client(const config::Config& c) {
    if (c.report.client == "http") {
        report::HttpClientOptions o;
        o.endpoint = c.report.endpoint;
        o.model = c.report.model;
        o.timeout = std::chrono::milliseconds(c.report.timeout_ms);
        if (const char* key = std::getenv(c.report.api_key_env.c_str())) o.api_key = key;
        return std::make_unique<report::HttpClient>(o);
    }
    if (c.report.client == "replay") {
        std::vector<std::string> responses;
        for (const auto& r : read_jsonl(c.report.replay_file)) responses.push_back(r.at("response").get<std::string>());
        return std::make_unique<report::ReplayClient>(std::move(responses));
    }
    return nullptr;
}

const std::vector<report::Exemplar>& exemplars(const config::Config& c, std::vector<report::Exemplar>& storage) {
    if (c.paths.exemplars.empty()) return report::bundled_exemplars();
    storage = report::load_exemplars(c.paths.exemplars);
    return storage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"apthunt: APT detection over system-event streams with CTI-derived indicators"};
    app.require_subcommand(1);
    std::string config_path, log_level;
    app.add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error");

    auto* amid_cmd = app.add_subcommand("amid", "Build or calibrate the knowledge base");
    amid_cmd->require_subcommand(1);
    std::vector<std::string> build_inputs;
    std::string out_path, vectors_override;
    auto* build = amid_cmd->add_subcommand("build", "Validate AMID records, build the index and write the store");
    build->add_option("inputs", build_inputs, "AMID interchange files to merge")->required()->check(CLI::ExistingFile);
    build->add_option("-o,--out", out_path, "output AMID file")->required();
    build->add_option("--vectors", vectors_override, "vector table (overrides paths.vectors)");

    std::string amid_path, benign_path;
    std::optional<double> alpha;
    auto* calibrate = amid_cmd->add_subcommand("calibrate", "Set theta_q from a benign event stream");
    calibrate->add_option("--amid", amid_path, "AMID file (overrides paths.amid)");
    calibrate->add_option("--benign", benign_path, "benign events, one JSON record per line")->required();
    calibrate->add_option("--alpha", alpha, "significance level");
    calibrate->add_option("-o,--out", out_path, "output AMID file (default: in place)");
    calibrate->add_option("--vectors", vectors_override, "vector table (overrides paths.vectors)");

    std::string events_path = "-", manifest_path;
    auto* detect_cmd = app.add_subcommand("detect", "Run detection over an event stream");
    detect_cmd->add_option("-e,--events", events_path, "event file, '-' for stdin");
    detect_cmd->add_option("-o,--out", out_path, "output records (default stdout)");
    detect_cmd->add_option("--manifest", manifest_path, "write the run manifest here as well");
    detect_cmd->add_option("--amid", amid_path, "AMID file (overrides paths.amid)");
    detect_cmd->add_option("--vectors", vectors_override, "vector table (overrides paths.vectors)");

    std::string alerts_path, alert_id, text_out;
    auto* report_cmd = app.add_subcommand("report", "Generate reports for alerts from a detect run");
    report_cmd->add_option("alerts", alerts_path, "detect output file")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--id", alert_id, "only this alert");
    report_cmd->add_option("-o,--out", out_path, "JSON reports (default stdout)");
    report_cmd->add_option("--text", text_out, "also write a readable rendering here");

    auto* lift_cmd = app.add_subcommand("lift", "Print the lifted phrases of an event stream");
    lift_cmd->add_option("-e,--events", events_path, "event file, '-' for stdin");
    bool lift_scores = false;
    lift_cmd->add_flag("--scores", lift_scores, "also print raw per-technique scores (needs paths.amid)");

    std::string truth_path;
    auto* eval_cmd = app.add_subcommand("eval", "Score detect output against ground truth");
    eval_cmd->add_option("alerts", alerts_path, "detect output file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("-t,--truth", truth_path, "ground truth JSON")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    auto logger = spdlog::stderr_color_mt("apthunt");
    spdlog::set_default_logger(logger);

    config::Config cfg;
    try {
        cfg = config::load(config_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_path));
        if (!vectors_override.empty()) cfg.paths.vectors = vectors_override;
        if (!amid_path.empty()) cfg.paths.amid = amid_path;
        if (!log_level.empty()) cfg.log_level = log_level;
        spdlog::set_level(spdlog::level::from_str(cfg.log_level));
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (build->parsed()) {
            auto engine = load_engine(cfg);
            std::string merged;
            for (const auto& in : build_inputs) merged += util::read_file(in) + "\n";
            auto store = amid::parse_amid(merged, engine.table, store_options(cfg));
            amid::save_amid(store, out_path);
            std::cout << json{{"aties", store.aties().size()},
                              {"giocs", store.gioc_count()},
                              {"clusters", store.index().cluster_count()},
                              {"bandwidth", store.index().bandwidth()},
                              {"embedding_ref", store.embedding_ref}}
                             .dump()
                      << "\n";
            return kOk;
        }
        if (calibrate->parsed()) {
            if (cfg.paths.amid.empty()) throw ConfigError("no AMID file given");
            auto engine = load_engine(cfg);
            auto store = amid::load_amid(cfg.paths.amid, engine.table, store_options(cfg));
            const auto benign = read_lifted(benign_path, engine);
            const auto audit = amid::calibrate_threshold(benign, store, alpha.value_or(cfg.matching.alpha));
            amid::save_amid(store, out_path.empty() ? cfg.paths.amid : out_path);
            std::cout << json{{"theta_q", audit.theta_q}, {"alpha", audit.alpha},     {"n", audit.n},
                              {"mean", audit.mean},       {"stddev", audit.stddev},   {"g_crit", audit.g_crit},
                              {"degenerate", audit.degenerate}}
                             .dump()
                      << "\n";
            return kOk;
        }
        if (detect_cmd->parsed()) {
            if (cfg.paths.amid.empty()) throw ConfigError("paths.amid is not set");
            auto engine = load_engine(cfg);
            auto store = amid::load_amid(cfg.paths.amid, engine.table, store_options(cfg));
            if (cfg.matching.theta_q) store.set_theta_q(*cfg.matching.theta_q);
            if (!store.calibrated()) throw StateError("AMID is not calibrated; run 'amid calibrate' or set matching.theta_q");
            const auto tactics = cfg.paths.tactic_table.empty() ? reasoning::TacticMap::bundled()
                                                                : reasoning::TacticMap::load(cfg.paths.tactic_table);
            auto client = make_client(cfg);
            std::vector<report::Exemplar> ex_storage;
            const auto& ex = exemplars(cfg, ex_storage);

            std::ofstream file_out;
            std::ostream* out = &std::cout;
            if (!out_path.empty()) {
                file_out.open(out_path, std::ios::binary);
                if (!file_out) throw DependencyError("cannot write " + out_path);
                out = &file_out;
            }
            const auto mf = config::manifest(cfg, store.theta_q());
            *out << mf.dump() << "\n";
            if (!manifest_path.empty()) write_file(manifest_path, mf.dump(2) + "\n");

            auto o = pipeline::detect_options(cfg);
            o.client = client.get();
            o.exemplars = &ex;

            detect::Detector det(store, tactics, engine.dns, engine.rules, o,
                                 [&](const json& j) { *out << j.dump() << "\n"; });
            std::ifstream file_in;
            std::istream* in = &std::cin;
            if (events_path != "-") {
                file_in.open(events_path);
                if (!file_in) throw DependencyError("cannot open " + events_path);
                in = &file_in;
            }
            const auto t0 = std::chrono::steady_clock::now();
            pipeline::run(det, *in);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const auto& s = det.stats();
            json summary = {{"type", "summary"},
                            {"events", s.events},
                            {"matched_events", s.matched_events},
                            {"quarantined", s.quarantined},
                            {"errors", s.errors},
                            {"alerts", s.alerts},
                            {"alert_updates", s.alert_updates},
                            {"suppressions", s.suppressions},
                            {"checkpoints", s.checkpoints},
                            {"peak_nodes", s.peak_nodes},
                            {"peak_edges", s.peak_edges}};
            *out << summary.dump() << "\n";
            spdlog::info("{} events in {:.2f} s ({:.0f} events/s), {} alerts", s.events, secs,
                         secs > 0 ? s.events / secs : 0.0, s.alerts);
            return kOk;
        }
        if (report_cmd->parsed()) {
            auto client = make_client(cfg);
            std::vector<report::Exemplar> ex_storage;
            const auto& ex = exemplars(cfg, ex_storage);
            std::ofstream file_out, text_file;
            std::ostream* out = &std::cout;
            if (!out_path.empty()) {
                file_out.open(out_path, std::ios::binary);
                out = &file_out;
            }
            if (!text_out.empty()) text_file.open(text_out, std::ios::binary);
            std::size_t n = 0;
            for (const auto& [id, record] : latest_alerts(read_jsonl(alerts_path))) {
                if (!alert_id.empty() && id != alert_id) continue;
                const auto alert = reasoning::alert_from_json(record);
                const auto r = report::build_report(alert, client.get(), cfg.report.second_opinion, ex);
                *out << report::to_json(r).dump() << "\n";
                if (text_file) text_file << report::render_text(r) << "\n";
                ++n;
            }
            if (!alert_id.empty() && n == 0) throw LookupError("no alert with id " + alert_id);
            return kOk;
        }
        if (lift_cmd->parsed()) {
            Engine engine{cfg, nullptr, {}, {}};
            std::optional<amid::AmidStore> store;
            if (lift_scores) {
                if (cfg.paths.amid.empty()) throw ConfigError("--scores needs paths.amid");
                engine = load_engine(cfg);
                store.emplace(amid::load_amid(cfg.paths.amid, engine.table, store_options(cfg)));
            } else {
                engine.rules = cfg.paths.lifting_rules.empty() ? lifting::LiftRules::defaults()
                                                               : lifting::LiftRules::load(cfg.paths.lifting_rules);
                if (!cfg.paths.dns_map.empty()) engine.dns = lifting::DnsMap::load(cfg.paths.dns_map);
            }
            std::ifstream file_in;
            std::istream* in = &std::cin;
            if (events_path != "-") {
                file_in.open(events_path);
                if (!file_in) throw DependencyError("cannot open " + events_path);
                in = &file_in;
            }
            event_io::EventReader reader(*in);
            while (auto ev = reader.next()) {
                if (reader.last_error()) {
                    spdlog::warn("line {}: {}", reader.last_error()->line, reader.last_error()->message);
                    continue;
                }
                const auto l = lifting::lift_event(*ev, engine.dns, engine.rules);
                json j = json::object();
                for (const auto& [f, p] : l.lifted) j[std::string(lifting::to_string(f))] = util::join(p);
                if (!l.warnings.empty()) j["warnings"] = l.warnings;
                if (store) {
                    json sc = json::object();
                    for (const auto& m : amid::select_matches(store->score_event(l), 0.0)) sc[m.atie_uid] = m.score;
                    j["scores"] = std::move(sc);
                }
                std::cout << j.dump() << "\n";
            }
            return kOk;
        }
        if (eval_cmd->parsed()) {
            std::vector<eval::ReportedGraph> graphs;
            for (const auto& [id, record] : latest_alerts(read_jsonl(alerts_path)))
                graphs.push_back(record.at("nodes").get<std::set<std::string>>());
            const auto m = eval::evaluate(graphs, eval::GroundTruth::load(truth_path));
            std::cout << eval::to_json(m).dump(2) << "\n";
            return kOk;
        }
    } catch (const ConfigError& e) {
        spdlog::error("config error: {}", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kDetectionError;
    }
    return kOk;
}

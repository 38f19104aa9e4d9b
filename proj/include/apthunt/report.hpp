#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "apthunt/reasoning.hpp"
#include "json.hpp"

namespace apthunt::report {

struct TimelineEntry {
    std::int64_t ts = 0;
    graph::EdgeId edge = 0;
    std::string src;  // node values, not keys
    std::string syscall;
    std::string dst;
    std::string technique;
    reasoning::Stage stage = reasoning::Stage::initial_compromise;
    double score = 0.0;
};

struct StageSummary {
    std::vector<std::string> nodes;
    std::vector<std::string> techniques;
    std::int64_t earliest = 0;
    std::int64_t latest = 0;
};

struct TechnicalDetails {
    std::vector<TimelineEntry> timeline;  // by ts
    nlohmann::json subgraph;              // JSON Graph Format
    std::map<reasoning::Stage, StageSummary> lifecycle;
    std::vector<std::string> ioc_list;  // sorted, unique
};

struct Guidance {
    std::string mitigation;
    std::string detection_rule;
    std::string hardening;
};

struct Narrative {
    std::string threat_actor;
    std::string objectives;
    std::string business_impact;
    std::vector<Guidance> guidance;
    std::string source;  // "client" or "template"
    std::string note;    // set when the template stood in for a failed client
};

enum class ClaimStatus { supported, unsupported };

struct Claim {
    std::string text;    // sentence the mention came from
    std::string entity;  // the mention itself
    std::string kind;    // ip, path, process, technique
    ClaimStatus status = ClaimStatus::supported;
    std::vector<std::string> evidence_refs;  // node keys or technique uids
};

struct AptReport {
    std::string alert_id;
    Narrative context;
    TechnicalDetails technical;
    std::vector<Claim> verification;
    std::optional<std::string> second_opinion;
};

// Plain prompt-in/text-out call. Implementations throw ClientError when the
// endpoint fails or times out.
class TextClient {
public:
    virtual ~TextClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::string name() const = 0;
};

struct ClientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Returns canned responses: by exact prompt when the map has it, else in order.
class ReplayClient final : public TextClient {
public:
    explicit ReplayClient(std::vector<std::string> responses);
    explicit ReplayClient(std::map<std::string, std::string> by_prompt);
    std::string complete(const std::string& prompt) override;
    std::string name() const override { return "replay"; }
    std::size_t calls() const noexcept { return calls_; }

private:
    std::vector<std::string> queue_;
    std::map<std::string, std::string> by_prompt_;
    std::size_t calls_ = 0;
    std::size_t next_ = 0;
    std::mutex mu_;
};

struct HttpClientOptions {
    std::string endpoint;  // http://host:port/path
    std::string model;
    std::chrono::milliseconds timeout{30000};
    std::string api_key;
};

// POSTs {"model", "prompt"} as JSON; accepts {"text": ...}, {"response": ...}
// or a chat-completions style body.
class HttpClient final : public TextClient {
public:
    explicit HttpClient(HttpClientOptions opts);
    std::string complete(const std::string& prompt) override;
    std::string name() const override { return "http"; }

private:
    HttpClientOptions opts_;
};

struct Exemplar {
    std::string title;
    std::string threat_actor;
    std::string objectives;
    std::string business_impact;
    Guidance guidance;
};

std::vector<Exemplar> load_exemplars(const std::filesystem::path& path);
const std::vector<Exemplar>& bundled_exemplars();

TechnicalDetails assemble_technical(const reasoning::Alert& alert);

// Generation prompt: role, evidence (lifecycle plus per-stage behaviors with
// timestamps), procedure, constraints and the sectioned answer format.
std::string render_prompt(const reasoning::Alert& alert, const TechnicalDetails& tech,
                          const std::vector<Exemplar>& exemplars = {});
std::string render_validation_prompt(const reasoning::Alert& alert, const TechnicalDetails& tech,
                                     const std::string& claim);

// Parses the sectioned answer; nullopt when a required section is missing.
std::optional<Narrative> parse_narrative(const std::string& text);
Narrative template_narrative(const reasoning::Alert& alert, const TechnicalDetails& tech);

// Client output when it parses, template text otherwise. Never throws on
// client failure.
Narrative generate_narrative(const reasoning::Alert& alert, const TechnicalDetails& tech, TextClient* client,
                             const std::vector<Exemplar>& exemplars = {});

struct EvidenceSet {
    std::map<std::string, std::string> entities;  // normalized mention -> node key or uid

    static EvidenceSet from_alert(const reasoning::Alert& alert);
    const std::string* lookup(const std::string& kind, const std::string& mention) const;
};

struct Mention {
    std::string kind;
    std::string value;
};

std::vector<Mention> extract_mentions(const std::string& text);

// Checks every entity mention in the context and guidance text. With a
// client, each unsupported claim is also put to it as a second opinion.
std::vector<Claim> verify_report(const AptReport& report, const EvidenceSet& evidence);
std::string second_opinion(const reasoning::Alert& alert, const TechnicalDetails& tech,
                           const std::vector<Claim>& claims, TextClient& client);

AptReport build_report(const reasoning::Alert& alert, TextClient* client, bool ask_second_opinion = false,
                       const std::vector<Exemplar>& exemplars = bundled_exemplars());

nlohmann::json to_json(const AptReport& r);
std::string render_text(const AptReport& r);

}  // namespace apthunt::report

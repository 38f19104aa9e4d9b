#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apthunt/embedding.hpp"
#include "apthunt/index.hpp"
#include "apthunt/lifting.hpp"

namespace apthunt::amid {

enum class GiocOrigin { extracted_svo, converted_ioc };

// General indicator of compromise: who does what to which object.
struct GIoC {
    lifting::Phrase subject;
    lifting::Phrase verb;
    lifting::Phrase object;
    std::string source_sentence;
    std::string technique_uid;
    GiocOrigin origin = GiocOrigin::extracted_svo;

    lifting::Phrase full_phrase() const;
};

// Attack technique intelligence entry.
struct Atie {
    std::string uid;
    std::string des;
    std::vector<std::string> list_cti;
    std::vector<GIoC> list_gioc;
};

bool is_technique_uid(std::string_view uid);

struct GiocHit {
    std::size_t gioc = 0;  // store-wide gIoC id
    double cosine = 0.0;
};

struct MatchResult {
    std::string atie_uid;
    double score = 0.0;  // Sim(e, t): total hit count over fields
    std::map<lifting::Field, std::vector<GiocHit>> field_hits;
};

struct StoreOptions {
    double theta_hit = 0.75;
    index::SearchMode search_mode = index::SearchMode::exact;
    index::IndexOptions index;
};

struct CalibrationAudit {
    double theta_q = 0.0;
    double alpha = 0.0;
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double g_crit = 0.0;
    bool degenerate = false;
};

// The knowledge base plus its query machinery. Read-only once built and
// calibrated, so one instance can serve any number of query threads.
class AmidStore {
public:
    AmidStore(std::vector<Atie> aties, std::shared_ptr<const embedding::VectorTable> table,
              StoreOptions opts = {});

    const std::vector<Atie>& aties() const noexcept { return aties_; }
    const Atie* find(std::string_view uid) const;
    std::size_t gioc_count() const noexcept { return refs_.size(); }
    const GIoC& gioc(std::size_t id) const;
    const Atie& atie_of_gioc(std::size_t id) const;

    // Full-phrase index over every gIoC; the role indexes share its ids.
    const index::ClusterIndex& index() const noexcept { return phrase_index_; }
    const index::ClusterIndex& role_index(lifting::Field f) const;

    const embedding::VectorTable& table() const noexcept { return *table_; }
    const StoreOptions& options() const noexcept { return opts_; }

    bool calibrated() const noexcept { return theta_q_.has_value(); }
    double theta_q() const;  // throws StateError when uncalibrated
    void set_theta_q(double theta, std::optional<CalibrationAudit> audit = std::nullopt);
    const std::optional<CalibrationAudit>& audit() const noexcept { return audit_; }

    // Written to the AMID header; defaults to the table fingerprint.
    std::string embedding_ref;

    // Per-ATIE hit counts for one lifted event, every ATIE with at least one hit.
    std::vector<MatchResult> score_event(const lifting::LiftedEvent& event) const;
    std::vector<index::Hit> field_hits(lifting::Field field, const lifting::Phrase& phrase) const;
    // Groups per-field hits by ATIE; score_event is this over field_hits.
    std::vector<MatchResult> aggregate(const std::map<lifting::Field, std::vector<index::Hit>>& hits) const;

private:
    std::vector<Atie> aties_;
    std::vector<std::pair<std::size_t, std::size_t>> refs_;  // gIoC id -> (atie, position)
    std::shared_ptr<const embedding::VectorTable> table_;
    StoreOptions opts_;
    index::ClusterIndex phrase_index_, subject_index_, verb_index_, object_index_;
    std::optional<double> theta_q_;
    std::optional<CalibrationAudit> audit_;
};

// Throws SchemaError (naming the offending line) on malformed records and
// DependencyError when no vector table is supplied.
AmidStore load_amid(const std::filesystem::path& path, std::shared_ptr<const embedding::VectorTable> table,
                    StoreOptions opts = {});
AmidStore parse_amid(std::string_view text, std::shared_ptr<const embedding::VectorTable> table,
                     StoreOptions opts = {});
std::string serialize_amid(const AmidStore& store);
void save_amid(const AmidStore& store, const std::filesystem::path& path);

// ATIEs with Sim(event, t) > theta_q, by score descending then uid.
std::vector<MatchResult> prov_q(const lifting::LiftedEvent& event, const AmidStore& store);

// Keeps results scoring above theta and orders them like prov_q.
std::vector<MatchResult> select_matches(std::vector<MatchResult> scored, double theta);

// Pools Sim(e, t) over every benign event and every ATIE and sets theta_q to
// the one-sided Grubbs boundary (max score under zero variance).
CalibrationAudit calibrate_threshold(std::span<const lifting::LiftedEvent> benign, AmidStore& store,
                                     double alpha = 0.05);

// Scores ATIEs against CTI-derived gIoCs, each treated as one query phrase.
std::vector<std::pair<std::string, double>> associate_cti(std::span<const GIoC> giocs, const AmidStore& store);

}  // namespace apthunt::amid

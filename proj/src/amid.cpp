#include "apthunt/amid.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include "json.hpp"
#include <regex>
#include <set>
#include <spdlog/spdlog.h>

#include "apthunt/errors.hpp"
#include "apthunt/stats.hpp"
#include "apthunt/util.hpp"

namespace apthunt::amid {

using lifting::Field;
using nlohmann::json;

lifting::Phrase GIoC::full_phrase() const {
    lifting::Phrase p = subject;
    p.insert(p.end(), verb.begin(), verb.end());
    p.insert(p.end(), object.begin(), object.end());
    return p;
}

bool is_technique_uid(std::string_view uid) {
    static const std::regex re(R"(T\d{4}(\.\d{3})?)");
    return std::regex_match(uid.begin(), uid.end(), re);
}

AmidStore::AmidStore(std::vector<Atie> aties, std::shared_ptr<const embedding::VectorTable> table, StoreOptions opts)
    : aties_(std::move(aties)), table_(std::move(table)), opts_(std::move(opts)) {
    if (!table_) throw DependencyError("AMID store needs a vector table");
    embedding_ref = table_->fingerprint;

    std::set<std::string> seen;
    for (std::size_t a = 0; a < aties_.size(); ++a) {
        auto& t = aties_[a];
        if (!is_technique_uid(t.uid)) throw SchemaError("ATIE uid '" + t.uid + "' is not a technique id");
        if (!seen.insert(t.uid).second) throw SchemaError("duplicate uid " + t.uid);
        for (std::size_t g = 0; g < t.list_gioc.size(); ++g) {
            auto& gi = t.list_gioc[g];
            if (gi.subject.empty() || gi.verb.empty() || gi.object.empty())
                throw SchemaError("ATIE " + t.uid + " gIoC #" + std::to_string(g) + " has an empty component");
            gi.technique_uid = t.uid;
            refs_.emplace_back(a, g);
        }
    }

    std::vector<embedding::Vector> full, subj, verb, obj;
    full.reserve(refs_.size());
    for (auto [a, g] : refs_) {
        const auto& gi = aties_[a].list_gioc[g];
        full.push_back(embedding::embed_phrase(gi.full_phrase(), *table_));
        subj.push_back(embedding::embed_phrase(gi.subject, *table_));
        verb.push_back(embedding::embed_phrase(gi.verb, *table_));
        obj.push_back(embedding::embed_phrase(gi.object, *table_));
    }
    auto io = opts_.index;
    io.theta_hit = opts_.theta_hit;
    auto f1 = std::async(std::launch::async, [&] { return index::ClusterIndex(std::move(subj), io); });
    auto f2 = std::async(std::launch::async, [&] { return index::ClusterIndex(std::move(verb), io); });
    auto f3 = std::async(std::launch::async, [&] { return index::ClusterIndex(std::move(obj), io); });
    phrase_index_ = index::ClusterIndex(std::move(full), io);
    subject_index_ = f1.get();
    verb_index_ = f2.get();
    object_index_ = f3.get();
}

const Atie* AmidStore::find(std::string_view uid) const {
    for (const auto& t : aties_)
        if (t.uid == uid) return &t;
    return nullptr;
}

const GIoC& AmidStore::gioc(std::size_t id) const {
    auto [a, g] = refs_.at(id);
    return aties_[a].list_gioc[g];
}

const Atie& AmidStore::atie_of_gioc(std::size_t id) const { return aties_[refs_.at(id).first]; }

const index::ClusterIndex& AmidStore::role_index(Field f) const {
    switch (f) {
        case Field::source: return subject_index_;
        case Field::destination: return object_index_;
        case Field::syscalltype:
        case Field::commandline: return verb_index_;
    }
    return verb_index_;
}

double AmidStore::theta_q() const {
    if (!theta_q_) throw StateError("AMID query threshold is not calibrated");
    return *theta_q_;
}

void AmidStore::set_theta_q(double theta, std::optional<CalibrationAudit> audit) {
    if (!(theta >= 0.0)) throw InputError("theta_q must be >= 0");
    theta_q_ = theta;
    audit_ = std::move(audit);
}

std::vector<index::Hit> AmidStore::field_hits(Field field, const lifting::Phrase& phrase) const {
    if (phrase.empty() || refs_.empty()) return {};
    const auto q = embedding::embed_phrase(phrase, *table_);
    auto a = phrase_index_.search(q, opts_.theta_hit, opts_.search_mode);
    auto b = role_index(field).search(q, opts_.theta_hit, opts_.search_mode);
    // union by gIoC id, both lists are sorted; a gIoC hit both ways counts once
    std::vector<index::Hit> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, std::max(a[i].second, b[j].second));
            ++i;
            ++j;
        }
    }
    return out;
}

std::vector<MatchResult> AmidStore::aggregate(const std::map<Field, std::vector<index::Hit>>& hits) const {
    std::map<std::size_t, MatchResult> by_atie;
    for (const auto& [field, list] : hits) {
        for (auto [id, cos] : list) {
            const auto atie = refs_.at(id).first;
            auto& m = by_atie[atie];
            m.atie_uid = aties_[atie].uid;
            m.field_hits[field].push_back(GiocHit{id, cos});
            m.score += 1.0;
        }
    }
    std::vector<MatchResult> out;
    out.reserve(by_atie.size());
    for (auto& [_, m] : by_atie) out.push_back(std::move(m));
    return out;
}

std::vector<MatchResult> AmidStore::score_event(const lifting::LiftedEvent& event) const {
    std::map<Field, std::vector<index::Hit>> hits;
    for (const auto& [field, phrase] : event.lifted) hits[field] = field_hits(field, phrase);
    return aggregate(hits);
}

std::vector<MatchResult> select_matches(std::vector<MatchResult> scored, double theta) {
    std::erase_if(scored, [&](const MatchResult& m) { return !(m.score > theta); });
    std::sort(scored.begin(), scored.end(), [](const MatchResult& a, const MatchResult& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.atie_uid < b.atie_uid;
    });
    return scored;
}

std::vector<MatchResult> prov_q(const lifting::LiftedEvent& event, const AmidStore& store) {
    const double theta = store.theta_q();
    return select_matches(store.score_event(event), theta);
}

CalibrationAudit calibrate_threshold(std::span<const lifting::LiftedEvent> benign, AmidStore& store, double alpha) {
    if (benign.empty()) throw CalibrationError("calibration needs at least one benign event");
    const std::size_t n_aties = store.aties().size();
    std::vector<double> pooled;
    pooled.reserve(benign.size() * n_aties);
    for (const auto& e : benign) {
        auto hits = store.score_event(e);
        for (const auto& m : hits) pooled.push_back(m.score);
        pooled.insert(pooled.end(), n_aties - hits.size(), 0.0);
    }
    if (pooled.size() < 3)
        throw CalibrationError("calibration needs at least 3 scores, got " + std::to_string(pooled.size()));
    // fixed order so the floating-point sums do not depend on input order
    std::sort(pooled.begin(), pooled.end());

    const auto g = stats::grubbs_one_sided(pooled, alpha);
    CalibrationAudit audit;
    audit.alpha = alpha;
    audit.n = g.n;
    audit.mean = g.mean;
    audit.stddev = g.stddev;
    audit.g_crit = g.g_crit;
    audit.degenerate = g.degenerate;
    audit.theta_q = g.degenerate ? pooled.back() : g.boundary;
    store.set_theta_q(audit.theta_q, audit);
    return audit;
}

std::vector<std::pair<std::string, double>> associate_cti(std::span<const GIoC> giocs, const AmidStore& store) {
    const double theta = store.theta_q();
    std::map<std::string, double> score;
    for (const auto& g : giocs) {
        auto phrase = g.full_phrase();
        if (phrase.empty()) continue;
        const auto q = embedding::embed_phrase(phrase, store.table());
        for (auto [id, _] : store.index().search(q, store.options().theta_hit, store.options().search_mode))
            score[store.atie_of_gioc(id).uid] += 1.0;
    }
    std::vector<std::pair<std::string, double>> out;
    for (auto& [uid, s] : score)
        if (s > theta) out.emplace_back(uid, s);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

// ---------------------------------------------------------------------------
// interchange format: one JSON object per line, optional header first

namespace {

std::string origin_str(GiocOrigin o) { return o == GiocOrigin::extracted_svo ? "extracted_svo" : "converted_ioc"; }

GiocOrigin origin_from(const std::string& s, std::size_t line) {
    if (s == "extracted_svo") return GiocOrigin::extracted_svo;
    if (s == "converted_ioc") return GiocOrigin::converted_ioc;
    throw SchemaError("line " + std::to_string(line) + ": unknown gIoC origin '" + s + "'");
}

}  // namespace

AmidStore parse_amid(std::string_view text, std::shared_ptr<const embedding::VectorTable> table, StoreOptions opts) {
    if (!table) throw DependencyError("loading an AMID requires a vector table");
    std::vector<Atie> aties;
    std::optional<double> theta_q;
    std::optional<CalibrationAudit> audit;
    std::string embedding_ref;
    std::set<std::string> seen;

    std::size_t line_no = 0;
    for (const auto& raw : util::split(text, '\n')) {
        ++line_no;
        auto line = util::trim(raw);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(where + ": not a JSON object: " + e.what());
        }
        if (!j.is_object()) throw SchemaError(where + ": not a JSON object");
        try {
            if (j.contains("amid_header")) {
                const auto& h = j["amid_header"];
                if (h.contains("theta_q") && !h["theta_q"].is_null()) theta_q = h["theta_q"].get<double>();
                if (h.contains("embedding_ref")) embedding_ref = h["embedding_ref"].get<std::string>();
                if (theta_q) {
                    CalibrationAudit a;
                    a.theta_q = *theta_q;
                    a.alpha = h.value("alpha", 0.0);
                    a.n = h.value("n", std::size_t{0});
                    audit = a;
                }
                continue;
            }
            Atie t;
            t.uid = j.at("uid").get<std::string>();
            if (!is_technique_uid(t.uid)) throw SchemaError(where + ": uid '" + t.uid + "' is not a technique id");
            if (!seen.insert(t.uid).second) throw SchemaError(where + ": duplicate uid " + t.uid);
            t.des = j.value("des", "");
            t.list_cti = j.value("list_cti", std::vector<std::string>{});
            for (const auto& g : j.at("list_gioc")) {
                GIoC gi;
                gi.subject = util::phrase_tokens(g.at("subject").get<std::string>());
                gi.verb = util::phrase_tokens(g.at("verb").get<std::string>());
                gi.object = util::phrase_tokens(g.at("object").get<std::string>());
                gi.source_sentence = g.value("source_sentence", "");
                gi.origin = origin_from(g.value("origin", "extracted_svo"), line_no);
                gi.technique_uid = t.uid;
                if (gi.subject.empty() || gi.verb.empty() || gi.object.empty())
                    throw SchemaError(where + ": gIoC of " + t.uid + " has an empty subject, verb or object");
                t.list_gioc.push_back(std::move(gi));
            }
            aties.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw SchemaError(where + ": " + e.what());
        }
    }

    AmidStore store(std::move(aties), table, std::move(opts));
    if (!embedding_ref.empty()) {
        if (!table->fingerprint.empty() && embedding_ref != table->fingerprint)
            spdlog::warn("AMID was built against {} but vector table is {}", embedding_ref, table->fingerprint);
        store.embedding_ref = embedding_ref;
    }
    if (theta_q) store.set_theta_q(*theta_q, audit);
    return store;
}

AmidStore load_amid(const std::filesystem::path& path, std::shared_ptr<const embedding::VectorTable> table,
                    StoreOptions opts) {
    if (!table) throw DependencyError("loading an AMID requires a vector table");
    return parse_amid(util::read_file(path), std::move(table), std::move(opts));
}

std::string serialize_amid(const AmidStore& store) {
    std::string out;
    json h;
    h["embedding_ref"] = store.embedding_ref;
    if (store.calibrated()) {
        h["theta_q"] = store.theta_q();
        if (store.audit()) {
            h["alpha"] = store.audit()->alpha;
            h["n"] = store.audit()->n;
        }
    }
    out += json{{"amid_header", h}}.dump() + "\n";
    for (const auto& t : store.aties()) {
        json j;
        j["uid"] = t.uid;
        j["des"] = t.des;
        j["list_cti"] = t.list_cti;
        j["list_gioc"] = json::array();
        for (const auto& g : t.list_gioc)
            j["list_gioc"].push_back({{"subject", util::join(g.subject)},
                                      {"verb", util::join(g.verb)},
                                      {"object", util::join(g.object)},
                                      {"source_sentence", g.source_sentence},
                                      {"origin", origin_str(g.origin)}});
        out += j.dump() + "\n";
    }
    return out;
}

void save_amid(const AmidStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DependencyError("cannot write " + path.string());
    out << serialize_amid(store);
}

}  // namespace apthunt::amid

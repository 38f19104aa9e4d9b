#pragma once

// Independent reference implementations shared by unit and acceptance tests.

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "apthunt/amid.hpp"
#include "apthunt/embedding.hpp"
#include "apthunt/lifting.hpp"
#include "apthunt/stats.hpp"

namespace oracle {

using apthunt::lifting::Field;
using apthunt::lifting::Phrase;

// One-sided Grubbs critical value from Boost's t quantile.
inline double gcrit(std::size_t n, double alpha) {
    const double dn = static_cast<double>(n);
    boost::math::students_t dist(dn - 2.0);
    const double t = boost::math::quantile(boost::math::complement(dist, alpha / dn));
    return (dn - 1.0) / std::sqrt(dn) * std::sqrt(t * t / (dn - 2.0 + t * t));
}

inline double mean(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double sample_sd(const std::vector<double>& x) {
    const double m = mean(x);
    double ss = 0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

// Direct reading of the selection rule, no shared code with stats.
inline std::set<std::string> select_high(const std::vector<apthunt::stats::LabeledScore>& l, double alpha) {
    std::set<std::string> all;
    for (const auto& [k, _] : l) all.insert(k);
    if (l.size() < 3) return all;
    std::vector<double> s;
    for (const auto& [_, v] : l) s.push_back(v);
    const double m = mean(s), sd = sample_sd(s);
    double scale = 0;
    for (double v : s) scale = std::max(scale, std::fabs(v));
    if (sd <= 1e-12 * std::max(scale, 1.0)) return all;
    const double g = gcrit(l.size(), alpha);
    std::set<std::string> high, kept;
    for (const auto& [k, v] : l) {
        if ((v - m) / sd > g) high.insert(k);
        if ((m - v) / sd <= g) kept.insert(k);
    }
    return high.empty() ? kept : high;
}

inline const Phrase& role_of(const apthunt::amid::GIoC& g, Field f) {
    switch (f) {
        case Field::source: return g.subject;
        case Field::destination: return g.object;
        default: return g.verb;
    }
}

// Sim(e, t) for every ATIE by scanning every gIoC; zero-score ATIEs included.
inline std::map<std::string, double> scores(const apthunt::lifting::LiftedEvent& e,
                                            const apthunt::amid::AmidStore& store) {
    using apthunt::embedding::cosine;
    using apthunt::embedding::embed_phrase;
    const auto& table = store.table();
    const double theta = store.options().theta_hit;
    std::map<std::string, double> out;
    for (const auto& t : store.aties()) out[t.uid] = 0.0;
    for (const auto& [field, phrase] : e.lifted) {
        if (phrase.empty()) continue;
        const auto q = embed_phrase(phrase, table);
        for (const auto& t : store.aties())
            for (const auto& g : t.list_gioc) {
                const bool full = cosine(q, embed_phrase(g.full_phrase(), table)) >= theta;
                const bool role = cosine(q, embed_phrase(role_of(g, field), table)) >= theta;
                if (full || role) out[t.uid] += 1.0;
            }
    }
    return out;
}

// (uid, score) with score > theta_q, score descending then uid.
inline std::vector<std::pair<std::string, double>> prov_q(const apthunt::lifting::LiftedEvent& e,
                                                          const apthunt::amid::AmidStore& store, double theta_q) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [uid, s] : scores(e, store))
        if (s > theta_q) out.emplace_back(uid, s);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return out;
}

// scores() with the gIoC vectors embedded once; for large stores.
class NaiveScorer {
public:
    explicit NaiveScorer(const apthunt::amid::AmidStore& store) : store_(store) {
        using apthunt::embedding::embed_phrase;
        for (const auto& t : store.aties())
            for (const auto& g : t.list_gioc)
                rows_.push_back({t.uid, embed_phrase(g.full_phrase(), store.table()), embed_phrase(g.subject, store.table()),
                                 embed_phrase(g.verb, store.table()), embed_phrase(g.object, store.table())});
    }

    std::vector<std::pair<std::string, double>> prov_q(const apthunt::lifting::LiftedEvent& e, double theta_q) const {
        using apthunt::embedding::cosine;
        const double theta = store_.options().theta_hit;
        std::map<std::string, double> score;
        for (const auto& [field, phrase] : e.lifted) {
            if (phrase.empty()) continue;
            const auto q = apthunt::embedding::embed_phrase(phrase, store_.table());
            for (const auto& r : rows_) {
                const auto& role = field == Field::source ? r.subject : field == Field::destination ? r.object : r.verb;
                if (cosine(q, r.full) >= theta || cosine(q, role) >= theta) score[r.uid] += 1.0;
            }
        }
        std::vector<std::pair<std::string, double>> out;
        for (const auto& [uid, s] : score)
            if (s > theta_q) out.emplace_back(uid, s);
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        return out;
    }

private:
    struct Row {
        std::string uid;
        apthunt::embedding::Vector full, subject, verb, object;
    };
    const apthunt::amid::AmidStore& store_;
    std::vector<Row> rows_;
};

// Small vocabulary so that random phrases collide often enough to produce hits.
inline std::shared_ptr<apthunt::embedding::VectorTable> vocab_table(std::size_t words, std::size_t dim,
                                                                   std::mt19937& rng) {
    std::normal_distribution<float> g;
    auto t = std::make_shared<apthunt::embedding::VectorTable>(dim);
    for (std::size_t i = 0; i < words; ++i) {
        apthunt::embedding::Vector v(dim);
        for (auto& x : v) x = g(rng);
        t->add("w" + std::to_string(i), std::move(v));
    }
    return t;
}

inline Phrase random_phrase(std::size_t words, std::mt19937& rng, std::size_t max_len = 3) {
    Phrase p(1 + rng() % max_len);
    for (auto& w : p) w = "w" + std::to_string(rng() % words);
    return p;
}

inline std::string technique_id(std::size_t i) {
    char buf[16];
    if (i % 3 == 0)
        std::snprintf(buf, sizeof buf, "T%04zu", 1000 + i);
    else
        std::snprintf(buf, sizeof buf, "T%04zu.%03zu", 1000 + i, i % 7 + 1);
    return buf;
}

inline std::vector<apthunt::amid::Atie> random_aties(std::size_t n_aties, std::size_t n_giocs, std::size_t words,
                                                     std::mt19937& rng) {
    std::vector<apthunt::amid::Atie> out(n_aties);
    for (std::size_t a = 0; a < n_aties; ++a) {
        out[a].uid = technique_id(a);
        out[a].des = "technique " + std::to_string(a);
        out[a].list_cti = {"cti-" + std::to_string(a % 5)};
    }
    for (std::size_t g = 0; g < n_giocs; ++g) {
        apthunt::amid::GIoC gi;
        gi.subject = random_phrase(words, rng);
        gi.verb = random_phrase(words, rng, 1);
        gi.object = random_phrase(words, rng);
        gi.source_sentence = "sentence " + std::to_string(g);
        gi.origin = g % 2 ? apthunt::amid::GiocOrigin::converted_ioc : apthunt::amid::GiocOrigin::extracted_svo;
        out[g % n_aties].list_gioc.push_back(std::move(gi));
    }
    return out;
}

inline apthunt::lifting::LiftedEvent random_event(std::size_t words, std::mt19937& rng) {
    apthunt::lifting::LiftedEvent e;
    for (auto f : apthunt::lifting::kAllFields)
        if (f != Field::commandline || rng() % 2) e.lifted[f] = random_phrase(words, rng);
    return e;
}

}  // namespace oracle

#include "apthunt/reasoning.hpp"

namespace oracle {

// Lifecycle with random evidence over random stages; timestamps collide on purpose.
inline apthunt::reasoning::CandidateLifecycle random_lifecycle(std::mt19937& rng) {
    using namespace apthunt::reasoning;
    CandidateLifecycle lc;
    for (auto s : kAllStages) {
        if (rng() % 2) continue;
        const int k = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < k; ++i) {
            Evidence e;
            e.edge = 1 + rng() % 30;
            e.node = 1 + rng() % 10;
            e.technique = "T" + std::to_string(1000 + rng() % 50);
            e.score = 1.0 + static_cast<double>(rng() % 9);
            e.ts = static_cast<std::int64_t>(rng() % 200);
            lc.evidence[s].push_back(e);
        }
        std::sort(lc.evidence[s].begin(), lc.evidence[s].end(),
                  [](const Evidence& a, const Evidence& b) { return a.ts < b.ts; });
    }
    return lc;
}

// Stage set left after dropping out-of-order first/last-stage evidence, computed directly.
inline std::map<apthunt::reasoning::Stage, std::size_t> streamlined_counts(
    const apthunt::reasoning::CandidateLifecycle& lc) {
    using apthunt::reasoning::Stage;
    std::optional<std::int64_t> first_mid_or_cm, last_mid;
    for (const auto& [s, ev] : lc.evidence)
        for (const auto& e : ev) {
            if (s != Stage::initial_compromise)
                first_mid_or_cm = first_mid_or_cm ? std::min(*first_mid_or_cm, e.ts) : e.ts;
            if (s != Stage::initial_compromise && s != Stage::complete_mission)
                last_mid = last_mid ? std::max(*last_mid, e.ts) : e.ts;
        }
    std::map<Stage, std::size_t> out;
    std::optional<std::int64_t> last_ic;
    if (auto it = lc.evidence.find(Stage::initial_compromise); it != lc.evidence.end())
        for (const auto& e : it->second)
            if (!first_mid_or_cm || e.ts <= *first_mid_or_cm) {
                ++out[Stage::initial_compromise];
                last_ic = last_ic ? std::max(*last_ic, e.ts) : e.ts;
            }
    std::optional<std::int64_t> last_other = last_mid;
    if (last_ic) last_other = last_other ? std::max(*last_other, *last_ic) : *last_ic;
    for (const auto& [s, ev] : lc.evidence) {
        if (s == Stage::initial_compromise) continue;
        for (const auto& e : ev)
            if (s != Stage::complete_mission || !last_other || e.ts >= *last_other) ++out[s];
    }
    return out;
}

}  // namespace oracle

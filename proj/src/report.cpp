#include "apthunt/report.hpp"

#include <algorithm>
#include <ctime>
#include <regex>
#include <spdlog/spdlog.h>
#include <sstream>

#include "apthunt/errors.hpp"
#include "apthunt/util.hpp"

#ifndef APTHUNT_DATA_DIR
#define APTHUNT_DATA_DIR "data"
#endif

namespace apthunt::report {

using nlohmann::json;
using reasoning::Stage;

namespace {

std::string iso_time(std::int64_t ns) {
    const std::time_t secs = static_cast<std::time_t>(ns / graph::kNsPerSecond);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string node_value(const graph::ProvNode& n) {
    if (n.kind == lifting::ObjectKind::process && !n.image.empty()) return n.image;
    return n.value;
}

std::string basename_of(std::string_view p) {
    auto pos = p.find_last_of("/\\");
    return std::string(pos == std::string_view::npos ? p : p.substr(pos + 1));
}

std::string strip_port(std::string_view ip) {
    // a.b.c.d:port only; IPv6 literals keep their colons
    if (std::count(ip.begin(), ip.end(), ':') == 1) return std::string(ip.substr(0, ip.find(':')));
    return std::string(ip);
}

std::vector<std::string> preview(const std::set<std::string>& values, std::size_t k = 3) {
    std::vector<std::string> out;
    for (const auto& v : values) {
        if (out.size() == k) break;
        out.push_back(v);
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) { return util::join(items, ", "); }

std::string stage_hardening(Stage s) {
    switch (s) {
        case Stage::initial_compromise: return "Restrict exposed services and require review of downloaded content.";
        case Stage::establish_foothold: return "Apply application allow-listing for interpreters and script hosts.";
        case Stage::escalate_privilege: return "Limit credential stores to their owners and enforce least privilege.";
        case Stage::internal_reconnaissance: return "Alert on bulk enumeration by non-administrative accounts.";
        case Stage::move_laterally: return "Segment internal networks and restrict remote service logins.";
        case Stage::maintain_persistence: return "Monitor autostart locations and scheduled jobs for changes.";
        case Stage::complete_mission: return "Enforce egress filtering and data loss prevention on sensitive stores.";
    }
    return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// technical details

TechnicalDetails assemble_technical(const reasoning::Alert& alert) {
    TechnicalDetails t;
    const auto& g = alert.subgraph;
    const auto& lc = alert.lifecycle;
    std::set<std::string> iocs;

    for (const auto& [stage, evs] : lc.evidence) {
        auto& sum = t.lifecycle[stage];
        std::set<std::string> nodes, techniques;
        for (const auto& ev : evs) {
            const auto* e = g.edge(ev.edge);
            if (!e) continue;
            const auto* src = g.node(e->src);
            const auto* dst = g.node(e->dst);
            t.timeline.push_back(
                TimelineEntry{ev.ts, ev.edge, node_value(*src), e->syscall, node_value(*dst), ev.technique, stage, ev.score});
            nodes.insert(node_value(*src));
            nodes.insert(node_value(*dst));
            techniques.insert(ev.technique);
            iocs.insert(node_value(*src));
            iocs.insert(node_value(*dst));
        }
        sum.nodes.assign(nodes.begin(), nodes.end());
        sum.techniques.assign(techniques.begin(), techniques.end());
        if (auto it = lc.stage_nodes.find(stage); it != lc.stage_nodes.end()) {
            sum.earliest = it->second.earliest;
            sum.latest = it->second.latest;
        }
    }
    std::stable_sort(t.timeline.begin(), t.timeline.end(), [](const TimelineEntry& a, const TimelineEntry& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        if (a.edge != b.edge) return a.edge < b.edge;
        if (a.technique != b.technique) return a.technique < b.technique;
        return a.stage < b.stage;
    });

    auto sub = g;
    for (auto& n : sub.nodes) {
        n.stage_labels.clear();
        if (auto it = lc.node_stages.find(n.id); it != lc.node_stages.end()) {
            for (auto s : it->second) n.stage_labels.insert(std::string(reasoning::to_string(s)));
            iocs.insert(node_value(n));
        }
    }
    t.subgraph = graph::to_jgf(sub);
    t.ioc_list.assign(iocs.begin(), iocs.end());
    return t;
}

// ---------------------------------------------------------------------------
// prompts

namespace {

std::string evidence_block(const reasoning::Alert& alert, const TechnicalDetails& tech) {
    std::ostringstream os;
    os << "## Evidence:\n**Alert Lifecycle**: ";
    std::vector<std::string> stages;
    for (auto s : alert.lifecycle.stages()) stages.emplace_back(reasoning::display_name(s));
    os << util::join(stages, " -> ") << "\n";
    os << "**Attack Behaviors in Each Stage of Lifecycle with the Timestamp**:\n";
    for (const auto& [stage, sum] : tech.lifecycle) {
        os << "- " << reasoning::display_name(stage) << ":\n";
        for (const auto& e : tech.timeline) {
            if (e.stage != stage) continue;
            os << "  - [" << iso_time(e.ts) << "] " << e.src << " " << e.syscall << " " << e.dst << " ("
               << e.technique << ")\n";
        }
    }
    os << "**Indicators**: " << join_list(tech.ioc_list) << "\n";
    return os.str();
}

}  // namespace

std::string render_prompt(const reasoning::Alert& alert, const TechnicalDetails& tech,
                          const std::vector<Exemplar>& exemplars) {
    std::ostringstream os;
    os << "You are a cybersecurity analyst generating an alert report based on observed system activity. "
          "Use only the evidence provided below.\n\n";
    os << evidence_block(alert, tech) << "\n";
    if (!exemplars.empty()) {
        os << "## Reference excerpts (structure and level of abstraction only):\n";
        for (const auto& x : exemplars) {
            os << "- " << x.title << "\n  Threat actor: " << x.threat_actor << "\n  Objectives: " << x.objectives
               << "\n  Business impact: " << x.business_impact << "\n  Mitigation: " << x.guidance.mitigation
               << "\n  Detection rule: " << x.guidance.detection_rule << "\n  Hardening: " << x.guidance.hardening
               << "\n";
        }
        os << "\n";
    }
    os << "## Procedure:\n"
          "1. Infer the attacker's intent from the stage behaviors.\n"
          "2. Assess the impact on the affected hosts and data.\n"
          "3. Formulate recommendations tied to the observed entities.\n\n";
    os << "## Generating contents:\n"
          "**High-Level Context**: Summarize the attack in one paragraph. Include:\n"
          "- Threat actor (if identifiable)\n- Likely objectives\n- Business impact\n\n"
          "**Actionable Guidance**: Provide specific recommendations. For each, include:\n"
          "- Mitigation step\n- Detection rule (e.g., YARA, Sigma)\n- Hardening strategy\n\n"
          "Do not invent information. All claims must be supported by the provided evidence.\n\n";
    os << "## Answer format (exactly these sections):\n"
          "### THREAT ACTOR\n<text>\n### OBJECTIVES\n<text>\n### BUSINESS IMPACT\n<text>\n### GUIDANCE\n"
          "- mitigation: <text>\n  detection_rule: <text>\n  hardening: <text>\n";
    return os.str();
}

std::string render_validation_prompt(const reasoning::Alert& alert, const TechnicalDetails& tech,
                                     const std::string& claim) {
    std::ostringstream os;
    os << "You are a cybersecurity analyst validating the authenticity of the content of an alert report based on "
          "observed system activity.\n\n";
    os << evidence_block(alert, tech) << "\n";
    os << "Review the following content from the alert report: \"" << claim << "\"\n";
    os << "Verify whether the entities it names relate to events of the provided evidence.\n\n";
    os << "If not, mark it as unsupported. Answer with SUPPORTED or UNSUPPORTED and one sentence of reasoning.\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// narrative

std::optional<Narrative> parse_narrative(const std::string& text) {
    std::map<std::string, std::string> sections;
    std::string current;
    for (const auto& raw : util::split(text, '\n')) {
        auto line = util::trim(raw);
        if (line.rfind("###", 0) == 0) {
            current = util::to_lower(util::trim(line.substr(3)));
            sections[current];
            continue;
        }
        if (current.empty()) continue;
        auto& s = sections[current];
        if (!s.empty()) s += "\n";
        s += std::string(line);
    }
    for (const char* k : {"threat actor", "objectives", "business impact", "guidance"})
        if (!sections.count(k) || util::trim(sections[k]).empty()) return std::nullopt;

    Narrative n;
    n.threat_actor = std::string(util::trim(sections["threat actor"]));
    n.objectives = std::string(util::trim(sections["objectives"]));
    n.business_impact = std::string(util::trim(sections["business impact"]));
    n.source = "client";

    Guidance cur;
    bool open = false;
    auto flush = [&] {
        if (open) n.guidance.push_back(cur);
        cur = {};
        open = false;
    };
    for (const auto& raw : util::split(sections["guidance"], '\n')) {
        auto line = std::string(util::trim(raw));
        if (line.empty()) continue;
        if (line.rfind("- ", 0) == 0) {
            flush();
            open = true;
            line = std::string(util::trim(std::string_view(line).substr(2)));
        }
        auto colon = line.find(':');
        if (colon == std::string::npos || !open) return std::nullopt;
        auto key = util::to_lower(util::trim(std::string_view(line).substr(0, colon)));
        auto val = std::string(util::trim(std::string_view(line).substr(colon + 1)));
        if (key == "mitigation")
            cur.mitigation = val;
        else if (key == "detection_rule" || key == "detection rule")
            cur.detection_rule = val;
        else if (key == "hardening")
            cur.hardening = val;
        else
            return std::nullopt;
    }
    flush();
    if (n.guidance.empty()) return std::nullopt;
    for (const auto& gd : n.guidance)
        if (gd.mitigation.empty() || gd.detection_rule.empty() || gd.hardening.empty()) return std::nullopt;
    return n;
}

Narrative template_narrative(const reasoning::Alert&, const TechnicalDetails& tech) {
    Narrative n;
    n.source = "template";
    n.threat_actor = "Unattributed. The evidence does not identify a threat actor.";

    std::vector<std::string> stage_names;
    for (const auto& [stage, _] : tech.lifecycle) stage_names.emplace_back(reasoning::display_name(stage));
    std::ostringstream obj;
    obj << "The activity progressed through " << join_list(stage_names) << ".";
    for (const auto& [stage, sum] : tech.lifecycle) {
        std::set<std::string> values(sum.nodes.begin(), sum.nodes.end());
        obj << " " << reasoning::display_name(stage) << ": " << join_list(sum.techniques) << " observed on "
            << join_list(preview(values)) << ".";
    }
    n.objectives = obj.str();

    std::ostringstream imp;
    if (auto it = tech.lifecycle.find(Stage::complete_mission); it != tech.lifecycle.end()) {
        std::set<std::string> values(it->second.nodes.begin(), it->second.nodes.end());
        imp << "Complete Mission behavior (" << join_list(it->second.techniques) << ") involved "
            << join_list(preview(values)) << ", so data on these assets should be treated as exposed.";
    } else {
        imp << "No Complete Mission behavior was observed. Impact is limited to the compromised entities listed "
               "in the technical details.";
    }
    n.business_impact = imp.str();

    for (const auto& [stage, sum] : tech.lifecycle) {
        const TimelineEntry* first = nullptr;
        for (const auto& e : tech.timeline)
            if (e.stage == stage) {
                first = &e;
                break;
            }
        if (!first) continue;
        Guidance g;
        g.mitigation = "Stop " + first->src + " and isolate " + first->dst + ".";
        g.detection_rule = "Sigma-style rule: alert when " + first->src + " performs " + first->syscall + " on " +
                           first->dst + " (" + first->technique + ").";
        g.hardening = stage_hardening(stage);
        n.guidance.push_back(std::move(g));
    }
    return n;
}

Narrative generate_narrative(const reasoning::Alert& alert, const TechnicalDetails& tech, TextClient* client,
                             const std::vector<Exemplar>& exemplars) {
    if (!client) return template_narrative(alert, tech);
    std::string note;
    try {
        auto text = client->complete(render_prompt(alert, tech, exemplars));
        if (auto parsed = parse_narrative(text)) return *parsed;
        note = "client output did not follow the sectioned format";
    } catch (const std::exception& e) {
        note = std::string("client ") + client->name() + " failed: " + e.what();
    }
    spdlog::warn("report {}: {}, using template", alert.id, note);
    auto n = template_narrative(alert, tech);
    n.note = note;
    return n;
}

// ---------------------------------------------------------------------------
// verification

namespace {

std::string normalize(const std::string& kind, std::string v) {
    while (!v.empty() && std::string_view(".,;:)]}'\"").find(v.back()) != std::string_view::npos) v.pop_back();
    if (kind == "ip") v = strip_port(v);
    return util::to_lower(v);
}

}  // namespace

EvidenceSet EvidenceSet::from_alert(const reasoning::Alert& alert) {
    EvidenceSet s;
    for (const auto& n : alert.subgraph.nodes) {
        switch (n.kind) {
            case lifting::ObjectKind::ip:
                s.entities["ip:" + normalize("ip", n.value)] = n.key;
                break;
            case lifting::ObjectKind::process:
                s.entities["process:" + util::to_lower(n.value)] = n.key;
                if (!n.image.empty()) {
                    s.entities["path:" + normalize("path", n.image)] = n.key;
                    s.entities["process:" + util::to_lower(basename_of(n.image))] = n.key;
                }
                break;
            default:
                s.entities["path:" + normalize("path", n.value)] = n.key;
                s.entities["process:" + util::to_lower(basename_of(n.value))] = n.key;
                break;
        }
    }
    // folders holding an evidence path are grounded as well
    std::vector<std::pair<std::string, std::string>> dirs;
    for (const auto& [k, key] : s.entities) {
        if (k.rfind("path:", 0) != 0) continue;
        auto p = k.substr(5);
        for (auto cut = p.find_last_of("/\\"); cut != std::string::npos && cut > 0; cut = p.find_last_of("/\\", cut - 1)) {
            auto dir = p.substr(0, cut);
            if (dir.size() <= 2 && dir.back() == ':') break;  // drive root
            dirs.emplace_back("path:" + dir, key);
        }
    }
    for (auto& [k, key] : dirs) s.entities.emplace(std::move(k), std::move(key));
    for (const auto& [_, evs] : alert.lifecycle.evidence)
        for (const auto& e : evs) s.entities["technique:" + util::to_lower(e.technique)] = e.technique;
    return s;
}

const std::string* EvidenceSet::lookup(const std::string& kind, const std::string& mention) const {
    auto k = normalize(kind, mention);
    auto kinds = kind == "registry" ? std::vector<std::string>{"path"} : std::vector<std::string>{kind};
    for (const auto& kd : kinds) {
        auto it = entities.find(kd + ":" + k);
        if (it != entities.end()) return &it->second;
        if (kd == "path") {
            // directory mention of a folder node, with or without trailing separator
            if (!k.empty() && (k.back() == '/' || k.back() == '\\')) {
                it = entities.find(kd + ":" + k.substr(0, k.size() - 1));
                if (it != entities.end()) return &it->second;
            }
        }
    }
    return nullptr;
}

std::vector<Mention> extract_mentions(const std::string& text) {
    static const std::regex win_path(R"([A-Za-z]:\\[^\s"'<>|,;()]*)");
    static const std::regex registry(R"(\bHK(?:LM|CU|CR|U|EY_[A-Z_]+)\\[^\s"'<>|,;()]*)");
    static const std::regex posix_path(R"((^|[\s"'(=])(/[A-Za-z0-9._\-~/]*[A-Za-z0-9_\-~/]))");
    static const std::regex ipv4(R"(\b(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)(?:\.(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)){3}(?::\d+)?\b)");
    static const std::regex technique(R"(\bT\d{4}(?:\.\d{3})?\b)");
    static const std::regex process(R"(\b[A-Za-z0-9_\-]+\.(?:exe|dll|ps1|bat|cmd|vbs|sh|py|elf|bin)\b)",
                                    std::regex::icase);

    std::vector<std::pair<std::size_t, Mention>> found;
    std::string masked = text;
    auto take = [&](const std::regex& re, const std::string& kind, int group) {
        for (auto it = std::sregex_iterator(masked.begin(), masked.end(), re); it != std::sregex_iterator(); ++it) {
            const auto& m = *it;
            auto value = m.str(group);
            while (!value.empty() && (value.back() == '.' || value.back() == ',')) value.pop_back();
            if (value.empty()) continue;
            found.emplace_back(static_cast<std::size_t>(m.position(group)), Mention{kind, value});
        }
        // blank out what was taken so shorter patterns do not match inside it
        std::string next = masked;
        for (auto it = std::sregex_iterator(masked.begin(), masked.end(), re); it != std::sregex_iterator(); ++it) {
            auto pos = static_cast<std::size_t>(it->position(group));
            std::fill(next.begin() + pos, next.begin() + pos + it->length(group), ' ');
        }
        masked = std::move(next);
    };
    take(registry, "registry", 0);
    take(win_path, "path", 0);
    take(posix_path, "path", 2);
    take(ipv4, "ip", 0);
    take(technique, "technique", 0);
    take(process, "process", 0);
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Mention> out;
    for (auto& [_, m] : found) out.push_back(std::move(m));
    return out;
}

namespace {

std::vector<std::string> sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        cur += c;
        const bool end = (c == '.' || c == '!' || c == '?') &&
                         (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])));
        if (end || c == '\n') {
            auto t = std::string(util::trim(cur));
            if (!t.empty()) out.push_back(t);
            cur.clear();
        }
    }
    auto t = std::string(util::trim(cur));
    if (!t.empty()) out.push_back(t);
    return out;
}

}  // namespace

std::vector<Claim> verify_report(const AptReport& report, const EvidenceSet& evidence) {
    std::vector<std::string> texts = {report.context.threat_actor, report.context.objectives,
                                      report.context.business_impact};
    for (const auto& g : report.context.guidance) {
        texts.push_back(g.mitigation);
        texts.push_back(g.detection_rule);
        texts.push_back(g.hardening);
    }
    std::vector<Claim> out;
    for (const auto& text : texts) {
        for (const auto& sentence : sentences(text)) {
            for (const auto& m : extract_mentions(sentence)) {
                Claim c;
                c.text = sentence;
                c.entity = m.value;
                c.kind = m.kind;
                if (const auto* ref = evidence.lookup(m.kind, m.value)) {
                    c.status = ClaimStatus::supported;
                    c.evidence_refs.push_back(*ref);
                } else {
                    c.status = ClaimStatus::unsupported;
                }
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::string second_opinion(const reasoning::Alert& alert, const TechnicalDetails& tech,
                           const std::vector<Claim>& claims, TextClient& client) {
    std::string out;
    for (const auto& c : claims) {
        if (c.status != ClaimStatus::unsupported) continue;
        try {
            out += c.entity + ": " + std::string(util::trim(client.complete(render_validation_prompt(alert, tech, c.text)))) + "\n";
        } catch (const std::exception& e) {
            out += c.entity + ": no answer (" + e.what() + ")\n";
        }
    }
    return out;
}

AptReport build_report(const reasoning::Alert& alert, TextClient* client, bool ask_second_opinion,
                       const std::vector<Exemplar>& exemplars) {
    AptReport r;
    r.alert_id = alert.id;
    r.technical = assemble_technical(alert);
    r.context = generate_narrative(alert, r.technical, client, exemplars);
    r.verification = verify_report(r, EvidenceSet::from_alert(alert));
    for (const auto& c : r.verification)
        if (c.status == ClaimStatus::unsupported)
            spdlog::warn("report {}: unsupported mention '{}'", alert.id, c.entity);
    if (ask_second_opinion && client) r.second_opinion = second_opinion(alert, r.technical, r.verification, *client);
    return r;
}

// ---------------------------------------------------------------------------
// exemplars and rendering

std::vector<Exemplar> load_exemplars(const std::filesystem::path& path) {
    std::vector<Exemplar> out;
    try {
        const auto doc = json::parse(util::read_file(path));
        for (const auto& x : doc.at("exemplars")) {
            Exemplar e;
            e.title = x.at("title").get<std::string>();
            e.threat_actor = x.at("threat_actor").get<std::string>();
            e.objectives = x.at("objectives").get<std::string>();
            e.business_impact = x.at("business_impact").get<std::string>();
            const auto& g = x.at("guidance");
            e.guidance = {g.at("mitigation").get<std::string>(), g.at("detection_rule").get<std::string>(),
                          g.at("hardening").get<std::string>()};
            out.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return out;
}

const std::vector<Exemplar>& bundled_exemplars() {
    static const std::vector<Exemplar> x = load_exemplars(std::filesystem::path(APTHUNT_DATA_DIR) / "report_exemplars.json");
    return x;
}

json to_json(const AptReport& r) {
    json timeline = json::array();
    for (const auto& e : r.technical.timeline)
        timeline.push_back({{"ts", e.ts},
                            {"time", iso_time(e.ts)},
                            {"edge", e.edge},
                            {"src", e.src},
                            {"syscall", e.syscall},
                            {"dst", e.dst},
                            {"technique", e.technique},
                            {"stage", reasoning::to_string(e.stage)},
                            {"score", e.score}});
    json lifecycle = json::object();
    for (const auto& [s, sum] : r.technical.lifecycle)
        lifecycle[std::string(reasoning::to_string(s))] = {{"nodes", sum.nodes},
                                                           {"techniques", sum.techniques},
                                                           {"earliest", sum.earliest},
                                                           {"latest", sum.latest}};
    json guidance = json::array();
    for (const auto& g : r.context.guidance)
        guidance.push_back({{"mitigation", g.mitigation}, {"detection_rule", g.detection_rule}, {"hardening", g.hardening}});
    json verification = json::array();
    for (const auto& c : r.verification)
        verification.push_back({{"claim", c.text},
                                {"entity", c.entity},
                                {"kind", c.kind},
                                {"status", c.status == ClaimStatus::supported ? "supported" : "unsupported"},
                                {"evidence_refs", c.evidence_refs}});
    json j = {{"type", "report"},
              {"alert_id", r.alert_id},
              {"high_level_context",
               {{"threat_actor", r.context.threat_actor},
                {"objectives", r.context.objectives},
                {"business_impact", r.context.business_impact},
                {"source", r.context.source}}},
              {"technical_details",
               {{"timeline", timeline},
                {"subgraph", r.technical.subgraph},
                {"lifecycle", lifecycle},
                {"ioc_list", r.technical.ioc_list}}},
              {"actionable_guidance", guidance},
              {"verification", verification}};
    if (!r.context.note.empty()) j["high_level_context"]["note"] = r.context.note;
    if (r.second_opinion) j["second_opinion"] = *r.second_opinion;
    return j;
}

std::string render_text(const AptReport& r) {
    std::ostringstream os;
    os << "APT REPORT " << r.alert_id << "\n\n== High-level context (" << r.context.source << ")\n";
    if (!r.context.note.empty()) os << "note: " << r.context.note << "\n";
    os << "Threat actor: " << r.context.threat_actor << "\nObjectives: " << r.context.objectives
       << "\nBusiness impact: " << r.context.business_impact << "\n\n== Technical details\nTimeline:\n";
    for (const auto& e : r.technical.timeline)
        os << "  " << iso_time(e.ts) << "  [" << reasoning::short_name(e.stage) << "] " << e.src << " " << e.syscall
           << " " << e.dst << "  " << e.technique << " (" << e.score << ")\n";
    os << "Lifecycle:\n";
    for (const auto& [s, sum] : r.technical.lifecycle)
        os << "  " << reasoning::display_name(s) << ": " << join_list(sum.techniques) << " on " << join_list(sum.nodes)
           << "\n";
    os << "IoCs:\n";
    for (const auto& i : r.technical.ioc_list) os << "  " << i << "\n";
    os << "\n== Actionable guidance\n";
    for (const auto& g : r.context.guidance)
        os << "- Mitigation: " << g.mitigation << "\n  Detection rule: " << g.detection_rule
           << "\n  Hardening: " << g.hardening << "\n";
    os << "\n== Verification\n";
    std::size_t bad = 0;
    for (const auto& c : r.verification)
        if (c.status == ClaimStatus::unsupported) {
            ++bad;
            os << "  UNSUPPORTED " << c.kind << " " << c.entity << ": " << c.text << "\n";
        }
    os << "  " << r.verification.size() - bad << " supported, " << bad << " unsupported mentions\n";
    if (r.second_opinion) os << "Second opinion:\n" << *r.second_opinion;
    return os.str();
}

}  // namespace apthunt::report

#include "apthunt/lifting.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include "json.hpp"

#include "apthunt/errors.hpp"
#include "apthunt/util.hpp"

namespace apthunt::lifting {

using nlohmann::json;

std::string_view to_string(ObjectKind k) {
    switch (k) {
        case ObjectKind::file: return "file";
        case ObjectKind::ip: return "ip";
        case ObjectKind::process: return "process";
        case ObjectKind::registry: return "registry";
    }
    return "file";
}

ObjectKind object_kind_from_string(std::string_view s) {
    if (s == "file") return ObjectKind::file;
    if (s == "ip") return ObjectKind::ip;
    if (s == "process") return ObjectKind::process;
    if (s == "registry") return ObjectKind::registry;
    throw InputError("unknown object kind '" + std::string(s) + "'");
}

std::string_view to_string(Field f) {
    switch (f) {
        case Field::source: return "source";
        case Field::destination: return "destination";
        case Field::syscalltype: return "syscalltype";
        case Field::commandline: return "commandline";
    }
    return "source";
}

Field field_from_string(std::string_view s) {
    for (auto f : kAllFields)
        if (to_string(f) == s) return f;
    throw InputError("unknown event field '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// rule tables

const LiftRules& LiftRules::defaults() {
    static const LiftRules rules = [] {
        LiftRules r;
        const auto L = Os::posix;
        const auto W = Os::windows;
        r.paths = {
            {L, "/etc/$D/*/$F.$E", "etc $D $E file"},
            {L, "/etc/$F.$E", "etc $E file"},
            {L, "/var/$D/*/$F.$E", "var $D $E file"},
            {L, "/proc/[PID]/$D/*/$F.$E", "proc $D $E file"},
            {L, "/bin|sbin/$D/*/$F.$E", "$F $E file"},
            {L, "/usr/bin|sbin/$D/*/$F.$E", "$F $E file"},
            {L, "/usr/local/bin|sbin/$D/*/$F.$E", "$F $E file"},
            {L, "/home/$U/$D/*/$F.$E", "user $D $F $E file"},
            {L, "/home/$U/$F.$E", "user $F $E file"},
            {L, "/root/$D/*/$F.$E", "root user $D $F $E file"},
            {L, "/root/$F.$E", "root user $F $E file"},
            {L, "/lib|lib32|lib64/$D/*/$F.$E", "$D library file"},
            {L, "/usr/local/lib/$D/*/$F.$E", "$D library file"},
            {L, "*/lib/$D/*/$F.$E", "$D library file"},
            {L, "/tmp/$F.$E", "tmp $E file"},
            {L, "*/$F.$E", "$E file"},
            {W, "hkey_*/*", "registry run key"},
            {W, "hkcu*/*", "registry run key"},
            {W, "hkcr/*", "registry run key"},
            {W, "hklm*/*", "registry run key"},
            {W, "hku*/*", "registry run key"},
            {W, "hkcc*/*", "registry run key"},
            {W, "c:/windows/system32/$D/*/$F.$E", "windows system $D $F.$E file"},
            {W, "c:/windows/$D/*/$F.$E", "windows system $D $F.$E file"},
            {W, "c:/programfiles|program files|programfiles(x86)|program files (x86)/$D/*/$F.$E", "$D $F $E file"},
            {W, "*/$F.$E", "$F $E file"},
        };
        r.commands = {
            {{"reg add"}, "add"},
            {{"reg del", "reg delete"}, "del"},
            {{"cp"}, "copy"},
            {{"scp", "ssh", "sftp", "tftp", "curl", "sshd", "certutil"}, "transfer"},
            {{"wget"}, "download"},
            {{"ls", "dir"}, "list"},
            {{"rm", "del", "rmdir"}, "remove"},
            {{"sh"}, "shell"},
            {{"stat", "cat"}, "show"},
            {{"schtask", "schtasks"}, "schedule"},
            {{"rundll", "rundll32"}, "run dll file"},
            {{"kill", "pkill", "taskkill"}, "stop"},
            {{"grep", "find"}, "search"},
            {{"cat"}, "read"},
        };
        r.syscalls = {
            {"execve", "execute"},    {"recvmsg", "receive"}, {"recvfrom", "receive"},
            {"sendmsg", "send"},      {"sendto", "send"},     {"chmod", "change file mode"},
        };
        return r;
    }();
    return rules;
}

LiftRules LiftRules::from_json(const json& j) {
    LiftRules r;
    try {
        for (const auto& p : j.at("paths")) {
            const auto os = p.at("os").get<std::string>();
            if (os != "linux" && os != "windows") throw ConfigError("path rule os must be linux or windows");
            r.paths.push_back({os == "linux" ? Os::posix : Os::windows, p.at("pattern").get<std::string>(),
                               p.at("output").get<std::string>()});
        }
        for (const auto& c : j.at("commands"))
            r.commands.push_back({c.at("names").get<std::vector<std::string>>(), c.at("output").get<std::string>()});
        for (const auto& [k, v] : j.at("syscalls").items()) r.syscalls.emplace(k, v.get<std::string>());
        if (j.contains("resolved_ip_style")) {
            const auto s = j["resolved_ip_style"].get<std::string>();
            if (s == "external_network_domain")
                r.resolved_ip_style = ResolvedIpStyle::external_network_domain;
            else if (s == "domain_only")
                r.resolved_ip_style = ResolvedIpStyle::domain_only;
            else
                throw ConfigError("unknown resolved_ip_style '" + s + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("lifting rules: ") + e.what());
    }
    return r;
}

LiftRules LiftRules::load(const std::filesystem::path& path) {
    try {
        return from_json(json::parse(util::read_file(path)));
    } catch (const json::parse_error& e) {
        throw ConfigError("lifting rules " + path.string() + ": " + e.what());
    }
}

json LiftRules::to_json() const {
    json j;
    j["paths"] = json::array();
    for (const auto& p : paths)
        j["paths"].push_back({{"os", p.os == Os::posix ? "linux" : "windows"}, {"pattern", p.pattern}, {"output", p.output}});
    j["commands"] = json::array();
    for (const auto& c : commands) j["commands"].push_back({{"names", c.names}, {"output", c.output}});
    j["syscalls"] = json::object();
    for (const auto& [k, v] : syscalls) j["syscalls"][k] = v;
    j["resolved_ip_style"] =
        resolved_ip_style == ResolvedIpStyle::external_network_domain ? "external_network_domain" : "domain_only";
    return j;
}

// ---------------------------------------------------------------------------
// dns map

void DnsMap::add(std::string address, std::string domain) { map_.insert_or_assign(std::move(address), std::move(domain)); }

const std::string* DnsMap::find(std::string_view address) const {
    auto it = map_.find(std::string(address));
    return it == map_.end() ? nullptr : &it->second;
}

DnsMap DnsMap::parse(std::string_view text) {
    DnsMap m;
    std::size_t line_no = 0;
    for (const auto& raw : util::split(text, '\n')) {
        ++line_no;
        auto line = util::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos) throw FormatError("dns map: expected \"address domain\"", line_no);
        m.add(std::string(line.substr(0, sp)), std::string(util::trim(line.substr(sp))));
    }
    return m;
}

DnsMap DnsMap::load(const std::filesystem::path& path) { return parse(util::read_file(path)); }

// ---------------------------------------------------------------------------
// paths

namespace {

struct SplitPath {
    std::vector<std::string> segments;
    bool is_dir = false;
};

SplitPath split_path(std::string_view path, Os os) {
    std::string p(path);
    if (os == Os::windows) {
        std::replace(p.begin(), p.end(), '\\', '/');
        p = util::to_lower(p);
    }
    SplitPath out;
    std::string cur;
    bool last_sep = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == '/') {
            if (last_sep) continue;  // collapse "//" and "\\\\"
            out.segments.push_back(std::move(cur));
            cur.clear();
            last_sep = true;
        } else {
            cur.push_back(p[i]);
            last_sep = false;
        }
    }
    if (!cur.empty()) {
        out.segments.push_back(std::move(cur));
    } else if (!out.segments.empty() && !(out.segments.size() == 1 && out.segments[0].empty())) {
        out.is_dir = true;
    }
    return out;
}

bool glob_match(std::string_view pat, std::string_view s) {
    std::size_t p = 0, i = 0, star = std::string_view::npos, mark = 0;
    while (i < s.size()) {
        if (p < pat.size() && (pat[p] == '?' || pat[p] == s[i])) {
            ++p;
            ++i;
        } else if (p < pat.size() && pat[p] == '*') {
            star = p++;
            mark = i;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            i = ++mark;
        } else {
            return false;
        }
    }
    while (p < pat.size() && pat[p] == '*') ++p;
    return p == pat.size();
}

bool literal_match(std::string_view pat, std::string_view seg) {
    std::size_t start = 0;
    while (true) {
        auto bar = pat.find('|', start);
        auto alt = pat.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
        if (glob_match(alt, seg)) return true;
        if (bar == std::string_view::npos) return false;
        start = bar + 1;
    }
}

bool is_pid_segment(std::string_view s) {
    if (s == "self" || s == "thread-self") return true;
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

struct Captures {
    std::string d, f;
    std::optional<std::string> e;  // nullopt: no extension
};

void split_file(std::string_view name, Captures& c) {
    auto dot = name.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == name.size()) {
        c.f = std::string(name);
        c.e.reset();
    } else {
        c.f = std::string(name.substr(0, dot));
        c.e = std::string(name.substr(dot + 1));
    }
}

bool match_segments(const std::vector<std::string>& pat, std::size_t pi, const std::vector<std::string>& segs,
                    std::size_t si, Captures& cap) {
    if (pi == pat.size()) return si == segs.size();
    const auto& p = pat[pi];
    if (p == "$F.$E") {
        if (pi + 1 != pat.size() || si + 1 != segs.size() || segs[si].empty()) return false;
        split_file(segs[si], cap);
        return true;
    }
    if (p == "*") {
        for (std::size_t k = si; k <= segs.size(); ++k) {
            Captures trial = cap;
            if (match_segments(pat, pi + 1, segs, k, trial)) {
                cap = std::move(trial);
                return true;
            }
        }
        return false;
    }
    if (si >= segs.size()) return false;
    if (p == "$D") {
        if (segs[si].empty()) return false;
        Captures trial = cap;
        trial.d = segs[si];
        if (!match_segments(pat, pi + 1, segs, si + 1, trial)) return false;
        cap = std::move(trial);
        return true;
    }
    if (p == "$U") return !segs[si].empty() && match_segments(pat, pi + 1, segs, si + 1, cap);
    if (p == "[PID]") return is_pid_segment(segs[si]) && match_segments(pat, pi + 1, segs, si + 1, cap);
    return literal_match(p, segs[si]) && match_segments(pat, pi + 1, segs, si + 1, cap);
}

std::vector<std::string> pattern_segments(const PathRule& rule) {
    // the split keeps the leading "" of absolute patterns so it lines up with paths
    auto segs = util::split(rule.pattern, '/');
    if (rule.os == Os::windows)
        for (auto& s : segs)
            if (!s.starts_with('$') && s != "[PID]") s = util::to_lower(s);
    return segs;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

std::string render(const std::string& tmpl, const Captures& cap, bool is_dir) {
    std::string e;
    if (cap.e)
        e = *cap.e;
    else if (tmpl.find("$F") == std::string::npos)
        e = cap.f;
    std::string out = replace_all(tmpl, "$D", cap.d);
    out = replace_all(out, "$F", cap.f);
    out = replace_all(out, "$E", e);
    auto toks = util::phrase_tokens(out);
    if (is_dir)
        for (auto& t : toks)
            if (t == "file") t = "folder";
    return util::join(toks);
}

bool has_separator(std::string_view s) { return s.find('/') != std::string_view::npos || s.find('\\') != std::string_view::npos; }

bool looks_lifted(std::string_view s) {
    // a phrase produced by the lifters: words only, no separators or dots
    if (s.find(' ') == std::string_view::npos) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        auto u = static_cast<unsigned char>(c);
        return std::islower(u) || std::isdigit(u) || c == ' ';
    });
}

}  // namespace

Os guess_os(std::string_view path) {
    if (path.size() >= 2 && std::isalpha(static_cast<unsigned char>(path[0])) && path[1] == ':') return Os::windows;
    if (path.find('\\') != std::string_view::npos) return Os::windows;
    auto lower = util::to_lower(path.substr(0, std::min<std::size_t>(path.size(), 4)));
    if (lower.starts_with("hk")) return Os::windows;
    return Os::posix;
}

std::optional<std::size_t> matching_path_rule(std::string_view path, Os os, const LiftRules& rules) {
    auto sp = split_path(path, os);
    if (sp.segments.empty()) return std::nullopt;
    for (std::size_t i = 0; i < rules.paths.size(); ++i) {
        if (rules.paths[i].os != os) continue;
        Captures cap;
        if (match_segments(pattern_segments(rules.paths[i]), 0, sp.segments, 0, cap)) return i;
    }
    return std::nullopt;
}

std::string lift_path(std::string_view path, Os os, const LiftRules& rules) {
    path = util::trim(path);
    if (path.empty()) throw InputError("lift_path: empty path");
    if (!has_separator(path) && looks_lifted(path)) return std::string(path);

    auto sp = split_path(path, os);
    for (const auto& rule : rules.paths) {
        if (rule.os != os) continue;
        Captures cap;
        if (match_segments(pattern_segments(rule), 0, sp.segments, 0, cap)) {
            auto out = render(rule.output, cap, sp.is_dir);
            if (!out.empty()) return out;
        }
    }
    return util::join(util::phrase_tokens(path));
}

// ---------------------------------------------------------------------------
// addresses

namespace {

std::string strip_port(std::string_view s) {
    if (s.starts_with('[')) {  // [v6]:port
        auto close = s.find(']');
        if (close != std::string_view::npos) return std::string(s.substr(1, close - 1));
    }
    auto colon = s.rfind(':');
    if (colon != std::string_view::npos && s.find(':') == colon) return std::string(s.substr(0, colon));
    return std::string(s);
}

std::string domain_label(std::string_view domain) {
    auto labels = util::split(util::to_lower(domain), '.');
    labels.erase(std::remove(labels.begin(), labels.end(), std::string()), labels.end());
    if (labels.empty()) return {};
    if (labels.size() == 1) return labels[0];
    return labels[labels.size() - 2];
}

}  // namespace

bool is_ip_literal(std::string_view s) {
    auto addr = strip_port(s);
    unsigned char buf[16];
    return inet_pton(AF_INET, addr.c_str(), buf) == 1 || inet_pton(AF_INET6, addr.c_str(), buf) == 1;
}

std::string lift_ip(std::string_view raw, const DnsMap& dns, const LiftRules& rules) {
    auto addr = strip_port(util::trim(raw));
    unsigned char b[16];
    bool internal = false;
    if (inet_pton(AF_INET, addr.c_str(), b) == 1) {
        internal = b[0] == 10 || (b[0] == 172 && (b[1] & 0xF0) == 16) || (b[0] == 192 && b[1] == 168);
    } else if (inet_pton(AF_INET6, addr.c_str(), b) == 1) {
        internal = (b[0] & 0xFE) == 0xFC;  // unique local fc00::/7
    } else {
        throw InputError("not an IP address: '" + std::string(raw) + "'");
    }
    if (internal) return "internal network";
    if (const auto* domain = dns.find(addr)) {
        auto label = util::join(util::phrase_tokens(domain_label(*domain)));
        if (!label.empty())
            return rules.resolved_ip_style == ResolvedIpStyle::external_network_domain ? "external network " + label
                                                                                       : label;
    }
    return "unknown network";
}

// ---------------------------------------------------------------------------
// commands and syscalls

namespace {

std::vector<std::string> split_args(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    char quote = 0;
    bool have = false;
    for (char c : s) {
        if (quote) {
            if (c == quote)
                quote = 0;
            else
                cur.push_back(c);
        } else if (c == '"' || c == '\'') {
            quote = c;
            have = true;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            if (have || !cur.empty()) out.push_back(std::move(cur));
            cur.clear();
            have = false;
        } else {
            cur.push_back(c);
        }
    }
    if (have || !cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string executable_name(std::string_view token) {
    auto slash = token.find_last_of("/\\");
    auto base = util::to_lower(slash == std::string_view::npos ? token : token.substr(slash + 1));
    if (base.ends_with(".exe")) base.resize(base.size() - 4);
    return base;
}

bool is_cmdlet(std::string_view t) {
    // Verb-Noun with capitalized parts, e.g. Get-ChildItem, Invoke-Command
    auto dash = t.find('-');
    if (dash == std::string_view::npos || dash == 0 || dash + 1 >= t.size()) return false;
    if (!std::isupper(static_cast<unsigned char>(t[0])) || !std::isupper(static_cast<unsigned char>(t[dash + 1])))
        return false;
    return std::all_of(t.begin(), t.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '-'; });
}

bool is_url(std::string_view t) {
    auto p = t.find("://");
    if (p == std::string_view::npos || p == 0) return false;
    return std::all_of(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(p), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '.' || c == '-';
    });
}

bool is_file_name(std::string_view t) {
    auto dot = t.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 >= t.size() || t.size() - dot - 1 > 6) return false;
    if (!std::isalpha(static_cast<unsigned char>(t[dot + 1]))) return false;
    return std::all_of(t.begin(), t.end(), [](char c) {
        auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || c == '.' || c == '_' || c == '-';
    });
}

const CommandRule* find_command(const LiftRules& rules, std::string_view name) {
    for (const auto& r : rules.commands)
        for (const auto& n : r.names)
            if (n == name) return &r;
    return nullptr;
}

std::string lift_argument(const std::string& tok, const DnsMap& dns, const LiftRules& rules) {
    if (tok.empty() || tok.front() == '-' || tok.front() == '+') return {};
    if (tok.size() == 2 && tok.front() == '/') return {};  // cmd.exe style switch such as /c
    if (is_url(tok)) {
        auto rest = std::string_view(tok).substr(tok.find("://") + 3);
        auto slash = rest.find('/');
        auto host = std::string(rest.substr(0, slash));
        std::string out;
        if (is_ip_literal(host)) {
            out = lift_ip(host, dns, rules);
        } else {
            auto h = host.substr(0, host.find(':'));
            out = util::join(util::phrase_tokens(domain_label(h)));
        }
        if (slash != std::string_view::npos && slash + 1 < rest.size()) {
            auto path = rest.substr(slash);
            path = path.substr(0, path.find_first_of("?#"));
            if (path.size() > 1) {
                auto p = lift_path(path, Os::posix, rules);
                out = out.empty() ? p : out + " " + p;
            }
        }
        return out;
    }
    if (is_ip_literal(tok)) return lift_ip(tok, dns, rules);
    if (has_separator(tok)) return lift_path(tok, guess_os(tok), rules);
    if (is_cmdlet(tok)) return split_cmdlet(tok);
    if (is_file_name(tok)) return lift_path(tok, Os::posix, rules);
    return util::join(util::phrase_tokens(tok));
}

}  // namespace

std::string split_cmdlet(std::string_view token) {
    std::string spaced;
    for (std::size_t i = 0; i < token.size(); ++i) {
        char c = token[i];
        if (c == '-') {
            spaced.push_back(' ');
            continue;
        }
        if (std::isupper(static_cast<unsigned char>(c)) && i > 0 && std::islower(static_cast<unsigned char>(token[i - 1])))
            spaced.push_back(' ');
        spaced.push_back(c);
    }
    return util::join(util::phrase_tokens(spaced));
}

std::string lift_command(std::string_view cmdline, const DnsMap& dns, const LiftRules& rules) {
    auto args = split_args(cmdline);
    if (args.empty()) return {};

    std::vector<std::string> parts;
    std::size_t next = 1;
    const auto exe = executable_name(args[0]);
    const CommandRule* rule = nullptr;
    if (args.size() > 1) {
        rule = find_command(rules, exe + " " + util::to_lower(args[1]));
        if (rule) next = 2;
    }
    if (!rule) rule = find_command(rules, exe);
    if (rule)
        parts.push_back(rule->output);
    else if (is_cmdlet(args[0]))
        parts.push_back(split_cmdlet(args[0]));
    else
        parts.push_back(util::join(util::phrase_tokens(exe)));

    for (std::size_t i = next; i < args.size(); ++i) {
        auto lifted = lift_argument(args[i], dns, rules);
        if (!lifted.empty()) parts.push_back(std::move(lifted));
    }
    parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
    return util::join(parts);
}

std::string lift_syscall(std::string_view name, const LiftRules& rules) {
    auto key = util::to_lower(util::trim(name));
    if (auto it = rules.syscalls.find(key); it != rules.syscalls.end()) return it->second;
    return util::join(util::phrase_tokens(key));
}

std::string application_name(std::string_view image) {
    auto os = guess_os(image);
    auto sp = split_path(image, os);
    if (sp.segments.empty()) return {};
    static const std::array<std::string_view, 17> kRoots = {
        "/usr/local/bin", "/usr/local/sbin", "/usr/local/lib", "/usr/local/share",
        "/usr/lib64",     "/usr/lib",        "/usr/share",     "/usr/bin",
        "/usr/sbin",      "/usr/local",      "/opt",           "/snap",
        "/bin",           "/sbin",           "c:/program files (x86)", "c:/program files",
        "c:/programfiles",
    };
    for (auto root : kRoots) {
        auto rs = util::split(root, '/');
        if (rs.size() > sp.segments.size()) continue;
        if (!std::equal(rs.begin(), rs.end(), sp.segments.begin())) continue;
        if (sp.segments.size() > rs.size() + 1) return util::join(util::phrase_tokens(sp.segments[rs.size()]));
        break;
    }
    return util::join(util::phrase_tokens(executable_name(sp.segments.back())));
}

// ---------------------------------------------------------------------------

namespace {

Phrase tokens_or(std::string_view lifted, std::string_view raw, std::string_view fallback) {
    auto t = util::phrase_tokens(lifted);
    if (t.empty()) t = util::phrase_tokens(raw);
    if (t.empty()) t.emplace_back(fallback);
    return t;
}

}  // namespace

LiftedEvent lift_event(const RawEvent& event, const DnsMap& dns, const LiftRules& rules) {
    LiftedEvent out;
    out.original = event;

    const auto& src = event.source;
    if (!src.image.empty() || !src.name.empty()) {
        auto name = !src.image.empty() ? application_name(src.image) : util::to_lower(src.name);
        out.lifted[Field::source] = tokens_or(name, src.name, "process");
    }

    const auto& dst = event.destination;
    if (!util::trim(dst.value).empty()) {
        std::string lifted;
        try {
            switch (dst.kind) {
                case ObjectKind::file: lifted = lift_path(dst.value, guess_os(dst.value), rules); break;
                case ObjectKind::registry: lifted = lift_path(dst.value, Os::windows, rules); break;
                case ObjectKind::ip: lifted = lift_ip(dst.value, dns, rules); break;
                case ObjectKind::process: lifted = application_name(dst.value); break;
            }
        } catch (const InputError& e) {
            out.warnings.emplace_back(std::string("destination: ") + e.what());
        }
        out.lifted[Field::destination] = tokens_or(lifted, dst.value, to_string(dst.kind));
    }

    if (!util::trim(event.syscall).empty())
        out.lifted[Field::syscalltype] = tokens_or(lift_syscall(event.syscall, rules), event.syscall, "syscall");

    if (!util::trim(event.cmdline).empty())
        out.lifted[Field::commandline] = tokens_or(lift_command(event.cmdline, dns, rules), event.cmdline, "command");

    return out;
}

}  // namespace apthunt::lifting

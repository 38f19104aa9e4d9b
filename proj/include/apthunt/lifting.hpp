#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace apthunt::lifting {

enum class Os { posix, windows };  // Linux-style vs Windows-style paths
enum class ObjectKind { file, ip, process, registry };

std::string_view to_string(ObjectKind k);
ObjectKind object_kind_from_string(std::string_view s);  // throws InputError

struct ProcessDesc {
    std::int64_t pid = 0;
    std::string image;  // full image path, may be empty
    std::string name;
    std::optional<std::int64_t> start;  // process start time, disambiguates pid reuse
};

struct ObjectDesc {
    ObjectKind kind = ObjectKind::file;
    std::string value;
    // only for kind == process
    std::optional<std::int64_t> pid;
    std::optional<std::int64_t> start;
};

struct RawEvent {
    std::int64_t ts = 0;  // ns since epoch
    std::string host;
    ProcessDesc source;
    ObjectDesc destination;
    std::string syscall;
    std::string cmdline;
};

enum class Field { source, destination, syscalltype, commandline };
inline constexpr Field kAllFields[] = {Field::source, Field::destination, Field::syscalltype, Field::commandline};
std::string_view to_string(Field f);
Field field_from_string(std::string_view s);

using Phrase = std::vector<std::string>;

struct LiftedEvent {
    RawEvent original;
    std::map<Field, Phrase> lifted;
    std::vector<std::string> warnings;
};

// One row of the path simplification table. Pattern segments are separated by
// '/' whatever the OS:
//   literal   matched exactly (case-insensitive on Windows); may hold '*'/'?'
//             wildcards and '|' alternatives
//   $D        one directory, captured
//   $U        one directory, ignored
//   [PID]     a numeric (or self) /proc entry
//   *         zero or more directories
//   $F.$E     final component, split at its last dot
// Templates substitute $D, $F and $E; output is lowercased and split on
// non-alphanumerics. Without an extension $E becomes empty when the template
// also names $F and takes the file name otherwise. Directories (trailing
// separator) are lifted the same way with "file" read as "folder".
struct PathRule {
    Os os = Os::posix;
    std::string pattern;
    std::string output;
};

struct CommandRule {
    std::vector<std::string> names;  // executable names, or "exe sub" pairs such as "reg add"
    std::string output;
};

enum class ResolvedIpStyle { external_network_domain, domain_only };

struct LiftRules {
    std::vector<PathRule> paths;
    std::vector<CommandRule> commands;
    std::unordered_map<std::string, std::string> syscalls;
    ResolvedIpStyle resolved_ip_style = ResolvedIpStyle::external_network_domain;

    static const LiftRules& defaults();
    static LiftRules from_json(const nlohmann::json& j);
    static LiftRules load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

// address -> domain, e.g. "64.233.160.0 google.com"
class DnsMap {
public:
    DnsMap() = default;
    void add(std::string address, std::string domain);
    const std::string* find(std::string_view address) const;
    std::size_t size() const noexcept { return map_.size(); }

    static DnsMap load(const std::filesystem::path& path);
    static DnsMap parse(std::string_view text);

private:
    std::unordered_map<std::string, std::string> map_;
};

Os guess_os(std::string_view path);

std::string lift_path(std::string_view path, Os os, const LiftRules& rules = LiftRules::defaults());
// Index of the rule that fires, or nullopt (never for the shipped tables).
std::optional<std::size_t> matching_path_rule(std::string_view path, Os os, const LiftRules& rules);

// Throws InputError when addr is not an IPv4/IPv6 literal (a trailing :port is accepted).
std::string lift_ip(std::string_view addr, const DnsMap& dns, const LiftRules& rules = LiftRules::defaults());
bool is_ip_literal(std::string_view s);

std::string lift_command(std::string_view cmdline, const DnsMap& dns = {},
                         const LiftRules& rules = LiftRules::defaults());
std::string lift_syscall(std::string_view name, const LiftRules& rules = LiftRules::defaults());

// Application name of a process image: the installation folder under a known
// root ("/opt/<app>/...", "C:\Program Files\<app>\..."), else the file name
// without extension.
std::string application_name(std::string_view image);

// "Get-ChildItem" -> "get child item"
std::string split_cmdlet(std::string_view token);

LiftedEvent lift_event(const RawEvent& event, const DnsMap& dns, const LiftRules& rules = LiftRules::defaults());

}  // namespace apthunt::lifting

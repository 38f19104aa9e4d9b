#include "apthunt/event_io.hpp"

#include <cmath>

#include "apthunt/errors.hpp"
#include "apthunt/graph.hpp"
#include "apthunt/util.hpp"

namespace apthunt::event_io {

using nlohmann::json;

std::int64_t seconds_to_ns(double s) { return std::llround(s * 1e9); }

namespace {

std::optional<std::int64_t> opt_seconds(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (j[key].is_number_integer()) return j[key].get<std::int64_t>() * graph::kNsPerSecond;
    return seconds_to_ns(j[key].get<double>());
}

json ns_to_seconds(std::int64_t ns) {
    if (ns % graph::kNsPerSecond == 0) return ns / graph::kNsPerSecond;
    return static_cast<double>(ns) / 1e9;
}

}  // namespace

lifting::RawEvent parse_event(std::string_view line, std::size_t line_no) {
    lifting::RawEvent e;
    try {
        const auto j = json::parse(line);
        if (j.contains("ts_ns"))
            e.ts = j["ts_ns"].get<std::int64_t>();
        else if (j.at("ts").is_number_integer())
            e.ts = j["ts"].get<std::int64_t>() * graph::kNsPerSecond;
        else
            e.ts = seconds_to_ns(j.at("ts").get<double>());
        e.host = j.value("host", "localhost");
        const auto& s = j.at("src");
        e.source.pid = s.at("pid").get<std::int64_t>();
        e.source.name = s.value("name", "");
        e.source.image = s.value("image", "");
        e.source.start = opt_seconds(s, "start");
        if (e.source.name.empty() && e.source.image.empty())
            throw FormatError("src needs a name or an image", line_no);
        const auto& d = j.at("dst");
        e.destination.kind = lifting::object_kind_from_string(d.at("kind").get<std::string>());
        e.destination.value = d.value("value", "");
        if (d.contains("pid") && !d["pid"].is_null()) e.destination.pid = d["pid"].get<std::int64_t>();
        e.destination.start = opt_seconds(d, "start");
        if (e.destination.value.empty()) throw FormatError("dst.value is empty", line_no);
        e.syscall = j.value("syscall", "");
        e.cmdline = j.value("cmdline", "");
    } catch (const json::exception& ex) {
        throw FormatError(std::string("bad event record: ") + ex.what(), line_no);
    } catch (const InputError& ex) {
        throw FormatError(ex.what(), line_no);
    }
    return e;
}

json to_json(const lifting::RawEvent& e) {
    json src = {{"pid", e.source.pid}, {"name", e.source.name}};
    if (!e.source.image.empty()) src["image"] = e.source.image;
    if (e.source.start) src["start"] = ns_to_seconds(*e.source.start);
    json dst = {{"kind", lifting::to_string(e.destination.kind)}, {"value", e.destination.value}};
    if (e.destination.pid) dst["pid"] = *e.destination.pid;
    if (e.destination.start) dst["start"] = ns_to_seconds(*e.destination.start);
    json j = {{"ts_ns", e.ts}, {"host", e.host}, {"src", src}, {"dst", dst}, {"syscall", e.syscall}};
    if (!e.cmdline.empty()) j["cmdline"] = e.cmdline;
    return j;
}

std::optional<lifting::RawEvent> EventReader::next() {
    error_.reset();
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (util::trim(line).empty()) continue;
        try {
            return parse_event(line, line_);
        } catch (const FormatError& e) {
            error_ = Error{line_, e.what()};
            return lifting::RawEvent{};  // caller inspects last_error()
        }
    }
    return std::nullopt;
}

}  // namespace apthunt::event_io

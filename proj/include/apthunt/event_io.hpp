#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include "apthunt/lifting.hpp"
#include "json.hpp"

namespace apthunt::event_io {

// One event per line:
//   {"ts": <seconds, fractional allowed>, "host": "...",
//    "src": {"pid": n, "name": "...", "image": "...", "start": <s>},
//    "dst": {"kind": "file|ip|process|registry", "value": "...", "pid": n, "start": <s>},
//    "syscall": "...", "cmdline": "..."}
// "ts_ns" may replace "ts". Throws FormatError.
lifting::RawEvent parse_event(std::string_view line, std::size_t line_no = 0);
nlohmann::json to_json(const lifting::RawEvent& e);

std::int64_t seconds_to_ns(double s);

// Streams events from a line-delimited source. Malformed lines are reported
// through `error` and skipped.
class EventReader {
public:
    explicit EventReader(std::istream& in) : in_(in) {}

    struct Error {
        std::size_t line;
        std::string message;
    };

    // nullopt at end of input; check last_error() after each call.
    std::optional<lifting::RawEvent> next();
    const std::optional<Error>& last_error() const noexcept { return error_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::optional<Error> error_;
};

}  // namespace apthunt::event_io

#pragma once

#include <stdexcept>
#include <string>

namespace apthunt {

// Root of every error the engine raises on purpose. Each subclass maps to one
// failure class so callers (the CLI in particular) can pick an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {       // bad argument to a pure function
public:
    using Error::Error;
};

class FormatError : public Error {      // malformed text file, carries line number
public:
    FormatError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public Error {      // structurally valid but violates a record invariant
public:
    using Error::Error;
};

class DependencyError : public Error {  // required companion artifact missing
public:
    using Error::Error;
};

class StateError : public Error {       // operation called in the wrong lifecycle phase
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class ReconciliationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace apthunt

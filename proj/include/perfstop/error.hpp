#pragma once

#include <stdexcept>
#include <string>

namespace perfstop {

// Base for every error raised by the library. Callers that only care about
// "something went wrong operationally" catch this one.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters: bad config field, out-of-range fraction, and so on.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Input does not satisfy an operation's precondition (empty series, too short, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Malformed sample files, failed external commands.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace perfstop

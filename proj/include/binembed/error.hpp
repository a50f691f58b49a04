#pragma once

#include <stdexcept>
#include <string>

namespace binembed {

// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file contents. Carries "<source>:<line>: <what>" when the
// offending line is known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
    ParseError(const std::string& source, size_t line, const std::string& msg)
        : Error(source + ":" + std::to_string(line) + ": " + msg) {}
};

// Mismatched vector dimensions or code lengths (includes register-alignment
// violations).
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// Invalid parameter or configuration value.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Structurally valid input that cannot be processed (empty input, unknown
// query word, vocabulary mismatch, too few usable pairs, out-of-domain value).
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// OS-level I/O failure; message includes the errno description.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace binembed

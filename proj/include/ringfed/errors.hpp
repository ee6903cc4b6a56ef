#pragma once

#include <stdexcept>
#include <string>

namespace ringfed {

// Bad user input: unknown keys, out-of-range values, impossible partitions.
// CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or malformed dataset files. CLI exit code 2.
class IngestError : public std::runtime_error {
public:
    explicit IngestError(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal contract (length mismatch, empty aggregation, bad window).
// CLI exit code 3.
class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ringfed

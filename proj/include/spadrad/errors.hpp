#pragma once

#include <stdexcept>
#include <string>

namespace spadrad {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent configuration (bad key, missing section, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Invalid or inconsistent physics data (bad table, domain mismatch, ...).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

/// Evaluation outside a table's energy domain.
class RangeError : public DataError {
public:
    RangeError(const std::string& what, double lo, double hi)
        : DataError(what), domain_lo(lo), domain_hi(hi) {}
    double domain_lo;
    double domain_hi;
};

/// Filesystem failures, reported with path context.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace spadrad

#pragma once

#include <stdexcept>
#include <string>

namespace jumpdet {

// Malformed or out-of-contract input data (files, series shapes, degenerate samples).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameter values or combinations.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace jumpdet

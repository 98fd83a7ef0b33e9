#pragma once

#include <stdexcept>
#include <string>

namespace iga1d {

/// Invalid scenario/configuration input. CLI exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: singular matrix, non-positive lumped mass,
/// time-integration blow-up. CLI exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system / format failure. CLI exit code 4.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace iga1d

#pragma once

#include <stdexcept>
#include <string>

namespace treecast {

// Index or level outside the tree.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Parameter outside its admissible domain (epsilon >= 1/2 for the coupling, bad psi, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Enumeration guard tripped.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Bad or missing configuration key; key() names the offender.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace treecast

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psep {

// Argument outside the mathematical domain of an operation (u <= 0, |theta| >= pi, p < 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation requested at (or too close to) a logarithmic singularity of a Hilbert transform.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid construction data or configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed textual input; position is a 0-based character offset into the parsed text.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t position)
        : ConfigError(what + " (at position " + std::to_string(position) + ")"), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// A simulated path exceeded its step budget.
class RunawayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Polygon or domain geometry unusable for simulation.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace psep

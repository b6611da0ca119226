#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mts2 {

/// Base class for all library errors. `code()` is a stable short identifier
/// used in CSV status fields and CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Request would evaluate a formula outside the stable region
/// (lambda1 + lambda2 too close to or above mu).
class StabilityViolation : public Error {
public:
    explicit StabilityViolation(const std::string& message)
        : Error("stability_violation", message) {}
};

/// A reward does not exceed the corresponding price.
class NonpositiveMargin : public Error {
public:
    explicit NonpositiveMargin(const std::string& message)
        : Error("nonpositive_margin", message) {}
};

/// A rate or cost that must be strictly positive is not.
class NonpositiveRate : public Error {
public:
    explicit NonpositiveRate(const std::string& message)
        : Error("nonpositive_rate", message) {}
};

class IndexOutOfRange : public Error {
public:
    explicit IndexOutOfRange(const std::string& message)
        : Error("index_out_of_range", message) {}
};

/// Simulation input with no demand at all.
class DegenerateConfig : public Error {
public:
    explicit DegenerateConfig(const std::string& message)
        : Error("degenerate_config", message) {}
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& message)
        : Error("no_convergence", message) {}
};

/// A joining profile fails the equilibrium conditions of its cell.
class NotAnEquilibrium : public Error {
public:
    explicit NotAnEquilibrium(const std::string& message)
        : Error("not_an_equilibrium", message) {}
};

/// Welfare optimization over an empty feasible region (no demand).
class EmptyFeasibleRegion : public Error {
public:
    explicit EmptyFeasibleRegion(const std::string& message)
        : Error("empty_feasible_region", message) {}
};

/// Malformed configuration document or CLI input.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message)
        : Error("config_error", message) {}
};

}  // namespace mts2

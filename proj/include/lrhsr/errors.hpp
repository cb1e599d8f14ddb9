// errors.hpp — exception hierarchy shared by all solver modules

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lrhsr {

// Invalid argument or parameter outside an operation's domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Requested quantity diverges (infinite lattice sum with s <= d, Li at q = 0 with beta <= 1, ...).
struct DivergenceError : DomainError {
    using DomainError::DomainError;
};

// Argument outside the region where an evaluation meets its accuracy contract.
struct AccuracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A conserved quantity or structural property was violated beyond tolerance.
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unperturbed spectrum too close to degenerate for non-degenerate perturbation theory.
struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense eigensolver failed for a given momentum.
struct SpectralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Eigenbasis too ill-conditioned to reconstruct a state from spectral data.
struct ConditioningError : std::runtime_error {
    ConditioningError(const std::string& what, double condition)
        : std::runtime_error(what), condition_number(condition) {}
    double condition_number;
};

// Adaptive integrator could not proceed; carries the time of the last accepted step.
struct IntegrationError : std::runtime_error {
    IntegrationError(const std::string& what, double t) : std::runtime_error(what), last_time(t) {}
    double last_time;
};

// IntegrationError carrying the last accepted state.
template <class State>
struct StateIntegrationError : IntegrationError {
    StateIntegrationError(const std::string& what, double t, State s)
        : IntegrationError(what, t), last_state(std::move(s)) {}
    State last_state;
};

// Least-squares fit could not be performed on the supplied data.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid experiment configuration; `key` names the offending entry.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& key_, const std::string& what)
        : std::runtime_error(key_.empty() ? what : key_ + ": " + what), key(key_) {}
    std::string key;
};

} // namespace lrhsr

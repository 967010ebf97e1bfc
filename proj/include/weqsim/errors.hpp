#pragma once

#include <stdexcept>
#include <string>

namespace weqsim {

/// Raised when a configuration document or parameter set violates an
/// invariant. Always names the offending key.
class validation_error : public std::runtime_error {
public:
    validation_error(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// An iterative kernel ran out of budget. Carries the best estimate so
/// callers can decide whether it is still usable.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double best, double residual)
        : std::runtime_error(what), best_(best), residual_(residual) {}
    double best() const noexcept { return best_; }
    double residual() const noexcept { return residual_; }

private:
    double best_;
    double residual_;
};

/// ODE step size underflowed, typically at a density node or other
/// singularity of the field.
class singularity_error : public std::runtime_error {
public:
    singularity_error(const std::string& what, double t)
        : std::runtime_error(what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// A Bohmian evaluation point fell below the node density threshold.
class node_proximity_error : public std::runtime_error {
public:
    node_proximity_error(double z, double t)
        : std::runtime_error("density below node threshold at z=" + std::to_string(z) +
                             " t=" + std::to_string(t)),
          z_(z), t_(t) {}
    double z() const noexcept { return z_; }
    double t() const noexcept { return t_; }

private:
    double z_;
    double t_;
};

class bracket_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace weqsim

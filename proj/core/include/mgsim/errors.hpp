#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace mgsim {

/// Invalid parameters, topology, or config-file content.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The time-stepping loop produced a non-finite state.
class SimulationDiverged : public std::runtime_error {
  public:
    SimulationDiverged(double time, Eigen::VectorXd state)
        : std::runtime_error("simulation diverged at t = " + std::to_string(time) + " s"),
          time_(time),
          state_(std::move(state)) {}

    double time() const { return time_; }
    const Eigen::VectorXd& state() const { return state_; }

  private:
    double time_;
    Eigen::VectorXd state_;
};

/// A hypothesis of the quantized-control certificate failed.
class NotCertifiable : public std::runtime_error {
  public:
    explicit NotCertifiable(const std::string& hypothesis)
        : std::runtime_error("not certifiable: " + hypothesis) {}
};

/// The algebraic steady-state solver did not converge.
class OracleFailure : public std::runtime_error {
  public:
    OracleFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const { return residual_; }

  private:
    double residual_;
};

}  // namespace mgsim

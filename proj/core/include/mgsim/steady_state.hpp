#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "mgsim/scenario.hpp"

namespace mgsim {

/// Synchronized equilibrium of the network + droop algebra, solved
/// independently of the time-stepping path. The state vector uses the plant
/// layout, expressed in the rotating frame where IBR 1's droop angle is zero
/// (matching a simulation trace rotated by -delta_1).
struct OperatingPoint {
    Eigen::VectorXd x;
    std::vector<double> p, q;       // per-IBR droop powers (filter output current)
    std::vector<double> v_amp;      // per-IBR voltage amplitude
    std::vector<double> delta;      // per-IBR angle, delta[0] == 0
    double omega_ss = 0.0;          // common steady frequency, rad/s
    double losses = 0.0;            // filter + line ohmic losses, W
    double residual = 0.0;
    int iterations = 0;
};

/// Solve with an explicit set of active loads (indices into scenario.loads).
/// Damped Newton iteration on {droop frequency equalities, droop voltage
/// equalities}; throws OracleFailure on non-convergence.
OperatingPoint steady_state(const Scenario& scenario, const std::vector<std::size_t>& active_loads);

/// Convenience: loads active at the given simulation time.
OperatingPoint steady_state_at(const Scenario& scenario, double at_time);

}  // namespace mgsim

#pragma once

#include <Eigen/Core>

namespace mgsim {

/// Instantaneous phase values of a three-phase quantity (volts or amperes).
struct ThreePhase {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Direct/quadrature components in a rotating frame, amplitude-invariant
/// scaling: a balanced set of peak X in phase with the frame maps to (X, 0).
struct Dq {
    double d = 0.0;
    double q = 0.0;

    Eigen::Vector2d vec() const { return {d, q}; }
    static Dq from(const Eigen::Vector2d& v) { return {v.x(), v.y()}; }
};

/// The constant skew matrix [[0,1],[-1,0]] used by every frequency-coupling
/// term. J*J = -I, J^T = -J.
const Eigen::Matrix2d& skew_j();

/// exp(theta*J), closed form [[cos,sin],[-sin,cos]]. rotation(0) = I and
/// rotation(a)*rotation(b) = rotation(a+b).
Eigen::Matrix2d rotation(double theta);

/// Park transform at angle theta. Convention: d aligned with phase a at
/// theta = 0, q axis lagging d by 90 degrees, so the coupling terms of the
/// dq network model carry -omega*J as written.
Dq abc_to_dq(const ThreePhase& x, double theta);

/// Exact inverse of abc_to_dq at the same angle.
ThreePhase dq_to_abc(const Dq& x, double theta);

/// Re-express a dq vector from a frame leading the base frame by delta:
/// x_base = rotation(delta) * x. rotate(x, -delta) goes the other way.
Dq rotate(const Dq& x, double delta);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double theta);

}  // namespace mgsim

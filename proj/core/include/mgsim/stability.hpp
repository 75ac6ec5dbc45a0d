#pragma once

#include <Eigen/Core>
#include <vector>

namespace mgsim {

/// Discrete linear system x(k+1) = A_d x + B_d u with a continuous feedback
/// law u = -K x realized through the nearest member of a finite input set.
/// An empty input set means the exact continuous law (epsilon = 0).
struct QuantizedSystem {
    Eigen::MatrixXd A_d;
    Eigen::MatrixXd B_d;
    Eigen::MatrixXd K;
    std::vector<Eigen::VectorXd> input_set;
    double x_radius = 0.0;  // Euclidean ball domain
    double epsilon = 0.0;   // covering radius of input_set over the input region
};

/// Quadratic certificate V(x) = x^T P x with the constants of the
/// ultimate-bound argument:
///   alpha1 |x|^2 <= V <= alpha2 |x|^2,  V(A_cl x) - V(x) <= -alpha3 |x|^2,
///   |V(x) - V(y)| <= alpha4 (|x|+|y|) |x-y|,
/// L_v the input-to-state Lipschitz constant |B_d|, z_bar the domain radius.
struct LyapunovCertificate {
    Eigen::MatrixXd P;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double alpha4 = 0.0;
    double l_v = 0.0;
    double z_bar = 0.0;
    double epsilon = 0.0;
    double bound_r = 0.0;  // sqrt(2 L_v alpha4 z_bar epsilon / alpha3)
};

/// Solve A_cl^T P A_cl - P = -Q by the convergent series
/// sum_k (A_cl^T)^k Q A_cl^k, accumulated in squaring batches and truncated
/// when increments fall below 1e-14 relative. Requires rho(A_cl) < 1 and
/// symmetric positive definite Q; throws NotCertifiable / ConfigError.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A_cl, const Eigen::MatrixXd& Q);

/// Fill the certificate constants from P and the Q used to produce it:
/// alpha1 = lambda_min(P), alpha2 = alpha4 = lambda_max(P),
/// alpha3 = lambda_min(Q), L_v = |B_d|_2, z_bar = x_radius,
/// epsilon from the system. bound_r is left unset.
LyapunovCertificate estimate_constants(const QuantizedSystem& sys, const Eigen::MatrixXd& P,
                                       const Eigen::MatrixXd& Q);

/// Ultimate bound r = sqrt(2 L_v alpha4 z_bar epsilon / alpha3); requires the
/// hypothesis alpha3/alpha1 < 2 (throws NotCertifiable naming the failure).
/// Also stores r into the certificate.
double ultimate_bound(LyapunovCertificate& cert);

/// solve_lyapunov + estimate_constants + ultimate_bound for the closed loop
/// A_cl = A_d - B_d K.
LyapunovCertificate certify(const QuantizedSystem& sys, const Eigen::MatrixXd& Q);

struct TrajectoryReport {
    long steps = 0;
    double decrease_fraction = 0.0;  // steps satisfying the V-decrease inequality
    double max_v = 0.0;
    double limsup_tail = 0.0;        // max |x| over the trailing 20% of steps
    double bound_r = 0.0;
    bool within_bound = false;       // limsup_tail <= bound_r
    bool left_domain = false;        // |x| exceeded z_bar somewhere (hypothesis violation)
};

/// Simulate x(k+1) = A_d x + B_d nearest(-K x) and check the per-step
/// decrease inequality V_{k+1} - V_k <= 2 eps L_v alpha4 z_bar - alpha3 |x|^2
/// along the trajectory. Leaving the domain is reported, not thrown.
TrajectoryReport verify_trajectory(const QuantizedSystem& sys, const LyapunovCertificate& cert,
                                   const Eigen::VectorXd& x0, long steps);

/// Built-in two-state demo with a gently unstable plant, scalar input
/// quantized on a symmetric grid over [-12, 12], and domain radius 10.
/// grid_points must be odd so the grid contains zero.
QuantizedSystem demo_system(int grid_points = 9);

/// Default initial state (2, -1) used by the demo trajectory checks.
Eigen::VectorXd demo_initial_state();

}  // namespace mgsim

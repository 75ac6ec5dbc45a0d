#include "mgsim/stability.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "mgsim/errors.hpp"

namespace mgsim {

namespace {

double spectral_radius(const Eigen::MatrixXd& a) {
    return a.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::VectorXd nearest_input(const std::vector<Eigen::VectorXd>& set,
                              const Eigen::VectorXd& target) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double d = (set[i] - target).norm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return set[best];
}

}  // namespace

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A_cl, const Eigen::MatrixXd& Q) {
    if (A_cl.rows() != A_cl.cols() || Q.rows() != Q.cols() || Q.rows() != A_cl.rows()) {
        throw ConfigError("solve_lyapunov: dimension mismatch");
    }
    if (!Q.isApprox(Q.transpose(), 1e-12)) {
        throw ConfigError("solve_lyapunov: Q must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qs(Q);
    if (qs.eigenvalues().minCoeff() <= 0.0) {
        throw ConfigError("solve_lyapunov: Q must be positive definite");
    }
    const double rho = spectral_radius(A_cl);
    if (rho >= 1.0) {
        throw NotCertifiable("spectral radius >= 1 (rho = " + std::to_string(rho) + ")");
    }

    // sum_k (A^T)^k Q A^k accumulated by repeated squaring: each pass adds
    // M^T P M with M = A^(2^j), doubling the number of series terms covered.
    Eigen::MatrixXd p = Q;
    Eigen::MatrixXd m = A_cl;
    for (int it = 0; it < 200; ++it) {
        const Eigen::MatrixXd inc = m.transpose() * p * m;
        p += inc;
        if (inc.norm() <= 1e-14 * p.norm()) break;
        m = m * m;
    }
    return 0.5 * (p + p.transpose());  // keep symmetry against roundoff
}

LyapunovCertificate estimate_constants(const QuantizedSystem& sys, const Eigen::MatrixXd& P,
                                       const Eigen::MatrixXd& Q) {
    LyapunovCertificate cert;
    cert.P = P;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ps(P);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qs(Q);
    cert.alpha1 = ps.eigenvalues().minCoeff();
    cert.alpha2 = ps.eigenvalues().maxCoeff();
    cert.alpha3 = qs.eigenvalues().minCoeff();
    // |V(x) - V(y)| = |(x+y)^T P (x-y)| <= lambda_max(P) (|x|+|y|) |x-y|
    cert.alpha4 = cert.alpha2;
    cert.l_v = sys.B_d.jacobiSvd().singularValues()(0);
    cert.z_bar = sys.x_radius;
    cert.epsilon = sys.epsilon;
    return cert;
}

double ultimate_bound(LyapunovCertificate& cert) {
    if (!(cert.alpha1 > 0.0) || !(cert.alpha3 > 0.0)) {
        throw NotCertifiable("alpha1 and alpha3 must be positive");
    }
    if (!(cert.alpha3 / cert.alpha1 < 2.0)) {
        throw NotCertifiable("alpha3/alpha1 >= 2 (ratio = " +
                             std::to_string(cert.alpha3 / cert.alpha1) + ")");
    }
    cert.bound_r = std::sqrt(2.0 * cert.l_v * cert.alpha4 * cert.z_bar * cert.epsilon /
                             cert.alpha3);
    return cert.bound_r;
}

LyapunovCertificate certify(const QuantizedSystem& sys, const Eigen::MatrixXd& Q) {
    const Eigen::MatrixXd a_cl = sys.A_d - sys.B_d * sys.K;
    LyapunovCertificate cert = estimate_constants(sys, solve_lyapunov(a_cl, Q), Q);
    ultimate_bound(cert);
    return cert;
}

TrajectoryReport verify_trajectory(const QuantizedSystem& sys, const LyapunovCertificate& cert,
                                   const Eigen::VectorXd& x0, long steps) {
    if (steps < 1) throw ConfigError("verify_trajectory needs steps >= 1");
    TrajectoryReport rep;
    rep.steps = steps;
    rep.bound_r = cert.bound_r;

    const double slack_const = 2.0 * cert.epsilon * cert.l_v * cert.alpha4 * cert.z_bar;
    const long tail_start = steps - steps / 5;

    Eigen::VectorXd x = x0;
    long ok = 0;
    for (long k = 0; k < steps; ++k) {
        const double nx = x.norm();
        if (nx > sys.x_radius) rep.left_domain = true;
        if (nx > 1e12) {  // hopeless; stop instead of overflowing
            rep.steps = k;
            break;
        }
        const double v0 = x.dot(cert.P * x);
        rep.max_v = std::max(rep.max_v, v0);
        if (k >= tail_start) rep.limsup_tail = std::max(rep.limsup_tail, nx);

        const Eigen::VectorXd u_bar = -sys.K * x;
        const Eigen::VectorXd u =
            sys.input_set.empty() ? u_bar : nearest_input(sys.input_set, u_bar);
        x = sys.A_d * x + sys.B_d * u;

        const double v1 = x.dot(cert.P * x);
        if (v1 - v0 <= slack_const - cert.alpha3 * nx * nx + 1e-12) ++ok;
    }
    rep.decrease_fraction = rep.steps > 0 ? static_cast<double>(ok) / rep.steps : 0.0;
    rep.within_bound = rep.limsup_tail <= rep.bound_r;
    return rep;
}

QuantizedSystem demo_system(int grid_points) {
    if (grid_points < 0 || (grid_points > 0 && grid_points % 2 == 0)) {
        throw ConfigError("demo grid_points must be odd (or 0 for the exact law)");
    }
    QuantizedSystem sys;
    sys.A_d.resize(2, 2);
    sys.A_d << 1.003, 0.050, -0.040, 0.997;  // gently unstable open loop
    sys.B_d.resize(2, 1);
    sys.B_d << 0.02, 0.10;
    sys.K.resize(1, 2);
    sys.K << 6.0, 2.3;  // closed-loop poles near 0.85 / 0.80
    sys.x_radius = 10.0;

    const double u_max = 12.0;
    if (grid_points > 0) {
        sys.input_set.reserve(grid_points);
        for (int i = 0; i < grid_points; ++i) {
            Eigen::VectorXd u(1);
            u[0] = -u_max + 2.0 * u_max * i / (grid_points - 1);
            sys.input_set.push_back(u);
        }
        // covering radius of the uniform grid over [-u_max, u_max]
        sys.epsilon = u_max / (grid_points - 1);
    }
    return sys;
}

Eigen::VectorXd demo_initial_state() {
    Eigen::VectorXd x0(2);
    x0 << 2.0, -1.0;
    return x0;
}

}  // namespace mgsim

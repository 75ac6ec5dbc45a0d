#include "mgsim/steady_state.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mgsim/errors.hpp"
#include "mgsim/frames.hpp"

namespace mgsim {

namespace {

struct Network {
    const Scenario* sc;
    Eigen::MatrixXd incidence;                  // n x m
    std::vector<Eigen::Matrix2d> bus_admittance;  // per bus, active loads only
    int n, m;
};

// Given amplitudes, angles and the common frequency, evaluate the network
// algebra and the droop residuals. Line and capacitor reactances use the
// actual steady frequency; load admittances are the fixed quasi-static maps
// the simulator uses.
struct Evaluation {
    Eigen::VectorXd v;    // 2n stacked [v_d; v_q]
    Eigen::VectorXd i_t;  // 2m
    Eigen::VectorXd i_f;  // 2n filter output currents
    Eigen::VectorXd i;    // 2n filter inductor currents
    std::vector<double> p, q;
};

Evaluation evaluate(const Network& net, const Eigen::VectorXd& v_amp,
                    const Eigen::VectorXd& delta, double omega) {
    const int n = net.n;
    const int m = net.m;
    Evaluation ev;
    ev.v.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        ev.v[i] = v_amp[i] * std::cos(delta[i]);
        ev.v[n + i] = -v_amp[i] * std::sin(delta[i]);  // q lags d
    }
    ev.i_t.resize(2 * m);
    for (int k = 0; k < m; ++k) {
        const Eigen::Matrix2d z =
            net.sc->lines[k].r_t * Eigen::Matrix2d::Identity() +
            omega * net.sc->lines[k].l_t * skew_j();
        Eigen::Vector2d dv = Eigen::Vector2d::Zero();
        for (int i = 0; i < n; ++i) {
            const double b = net.incidence(i, k);
            if (b == 0.0) continue;
            dv += b * Eigen::Vector2d{ev.v[i], ev.v[n + i]};
        }
        const Eigen::Vector2d it = -z.inverse() * dv;
        ev.i_t[k] = it.x();
        ev.i_t[m + k] = it.y();
    }
    ev.i_f.resize(2 * n);
    ev.i.resize(2 * n);
    ev.p.assign(n, 0.0);
    ev.q.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d vb{ev.v[i], ev.v[n + i]};
        Eigen::Vector2d line_in = Eigen::Vector2d::Zero();
        for (int k = 0; k < m; ++k) {
            const double b = net.incidence(i, k);
            if (b == 0.0) continue;
            line_in += b * Eigen::Vector2d{ev.i_t[k], ev.i_t[m + k]};
        }
        const Eigen::Vector2d il = net.bus_admittance[i] * vb;
        const Eigen::Vector2d i_f = il - line_in;
        const Eigen::Vector2d ii = omega * net.sc->ibrs[i].c * (skew_j() * vb) + i_f;
        ev.i_f[i] = i_f.x();
        ev.i_f[n + i] = i_f.y();
        ev.i[i] = ii.x();
        ev.i[n + i] = ii.y();
        ev.p[i] = 1.5 * vb.dot(i_f);
        ev.q[i] = 1.5 * vb.dot(skew_j() * i_f);
    }
    return ev;
}

// unknowns z = [V_1..V_n, delta_2..delta_n, omega]; delta_1 = 0
Eigen::VectorXd residual(const Network& net, const Eigen::VectorXd& z) {
    const int n = net.n;
    Eigen::VectorXd v_amp = z.head(n);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    delta.tail(n - 1) = z.segment(n, n - 1);
    const double omega = z[2 * n - 1];

    const Evaluation ev = evaluate(net, v_amp, delta, omega);
    Eigen::VectorXd f(2 * n);
    for (int i = 0; i < n; ++i) {
        f[i] = (net.sc->droop[i].omega_g - net.sc->droop[i].m_p * ev.p[i]) - omega;
        f[n + i] = (net.sc->droop[i].v_nom - net.sc->droop[i].n_q * ev.q[i]) - v_amp[i];
    }
    return f;
}

OperatingPoint pack(const Network& net, const Eigen::VectorXd& v_amp,
                    const Eigen::VectorXd& delta, double omega, double resid, int iters) {
    const int n = net.n;
    const int m = net.m;
    const Evaluation ev = evaluate(net, v_amp, delta, omega);

    OperatingPoint op;
    op.x.resize(4 * n + 2 * m);
    for (int i = 0; i < n; ++i) {
        op.x[i] = ev.v[i];
        op.x[n + i] = ev.v[n + i];
        op.x[2 * n + i] = ev.i[i];
        op.x[3 * n + i] = ev.i[n + i];
    }
    for (int k = 0; k < m; ++k) {
        op.x[4 * n + k] = ev.i_t[k];
        op.x[4 * n + m + k] = ev.i_t[m + k];
    }
    op.p = ev.p;
    op.q = ev.q;
    op.v_amp.assign(v_amp.data(), v_amp.data() + n);
    op.delta.assign(delta.data(), delta.data() + n);
    op.omega_ss = omega;
    op.residual = resid;
    op.iterations = iters;
    op.losses = 0.0;
    for (int i = 0; i < n; ++i) {
        op.losses += 1.5 * net.sc->ibrs[i].r *
                     (ev.i[i] * ev.i[i] + ev.i[n + i] * ev.i[n + i]);
    }
    for (int k = 0; k < m; ++k) {
        op.losses += 1.5 * net.sc->lines[k].r_t *
                     (ev.i_t[k] * ev.i_t[k] + ev.i_t[m + k] * ev.i_t[m + k]);
    }
    return op;
}

}  // namespace

OperatingPoint steady_state(const Scenario& sc, const std::vector<std::size_t>& active_loads) {
    sc.validate();
    const int n = sc.topology.n_ibr;

    Network net;
    net.sc = &sc;
    net.n = n;
    net.m = sc.topology.n_lines();
    net.incidence = incidence_matrix(sc.topology);
    net.bus_admittance.assign(n, Eigen::Matrix2d::Zero());
    for (std::size_t idx : active_loads) {
        if (idx >= sc.loads.size()) throw ConfigError("active load index out of range");
        const LoadSpec& l = sc.loads[idx];
        net.bus_admittance[l.bus - 1] += load_admittance(l, sc.load_sizing_rms());
    }

    bool all_droop_off = true;
    bool any_droop_off = false;
    for (const auto& d : sc.droop) {
        if (d.m_p == 0.0) any_droop_off = true; else all_droop_off = false;
    }
    if (any_droop_off && !all_droop_off) {
        throw OracleFailure("mixed zero/nonzero m_p is not supported", 0.0);
    }

    constexpr double kTol = 1e-9;
    constexpr int kMaxIter = 100;

    if (all_droop_off) {
        // omega = omega_g and all angles pinned at zero; solve the voltage
        // relations only.
        Eigen::VectorXd v_amp = Eigen::VectorXd::Constant(n, sc.droop[0].v_nom);
        const Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
        const double omega = sc.omega_g;
        auto res_v = [&](const Eigen::VectorXd& va) {
            const Evaluation ev = evaluate(net, va, delta, omega);
            Eigen::VectorXd f(n);
            for (int i = 0; i < n; ++i) {
                f[i] = (sc.droop[i].v_nom - sc.droop[i].n_q * ev.q[i]) - va[i];
            }
            return f;
        };
        double rnorm = res_v(v_amp).cwiseAbs().maxCoeff();
        int it = 0;
        while (rnorm > kTol && it < kMaxIter) {
            const Eigen::VectorXd f0 = res_v(v_amp);
            Eigen::MatrixXd jac(n, n);
            for (int j = 0; j < n; ++j) {
                Eigen::VectorXd vp = v_amp;
                const double h = 1e-6 * std::max(1.0, std::abs(vp[j]));
                vp[j] += h;
                jac.col(j) = (res_v(vp) - f0) / h;
            }
            v_amp -= jac.fullPivLu().solve(f0);
            rnorm = res_v(v_amp).cwiseAbs().maxCoeff();
            ++it;
        }
        if (rnorm > kTol) throw OracleFailure("steady-state solve did not converge", rnorm);
        return pack(net, v_amp, delta, omega, rnorm, it);
    }

    Eigen::VectorXd z(2 * n);
    for (int i = 0; i < n; ++i) z[i] = sc.droop[i].v_nom;
    z.segment(n, n - 1).setZero();
    z[2 * n - 1] = sc.omega_g;

    double rnorm = residual(net, z).cwiseAbs().maxCoeff();
    int it = 0;
    while (rnorm > kTol && it < kMaxIter) {
        const Eigen::VectorXd f0 = residual(net, z);
        Eigen::MatrixXd jac(2 * n, 2 * n);
        for (int j = 0; j < 2 * n; ++j) {
            Eigen::VectorXd zp = z;
            const double h = 1e-7 * std::max(1.0, std::abs(zp[j]));
            zp[j] += h;
            jac.col(j) = (residual(net, zp) - f0) / h;
        }
        const Eigen::VectorXd step = jac.fullPivLu().solve(f0);

        // damped update: halve until the residual shrinks
        double scale = 1.0;
        Eigen::VectorXd z_next = z - step;
        double rnext = residual(net, z_next).cwiseAbs().maxCoeff();
        for (int back = 0; back < 30 && !(rnext < rnorm); ++back) {
            scale *= 0.5;
            z_next = z - scale * step;
            rnext = residual(net, z_next).cwiseAbs().maxCoeff();
        }
        z = z_next;
        rnorm = rnext;
        ++it;
    }
    if (rnorm > kTol) throw OracleFailure("steady-state solve did not converge", rnorm);

    Eigen::VectorXd v_amp = z.head(n);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    delta.tail(n - 1) = z.segment(n, n - 1);
    return pack(net, v_amp, delta, z[2 * n - 1], rnorm, it);
}

OperatingPoint steady_state_at(const Scenario& sc, double at_time) {
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < sc.loads.size(); ++j) {
        if (sc.loads[j].active_at(at_time)) active.push_back(j);
    }
    return steady_state(sc, active);
}

}  // namespace mgsim

#include "mgsim/inner_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgsim/errors.hpp"

namespace mgsim {

namespace {

double clamp_sym(double x, double limit) { return std::clamp(x, -limit, limit); }

// Monotone-chain convex hull of a small 2D point set, CCW without collinear
// duplicates.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) { return a == b; }),
              pts.end());
    const auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                          const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    if (pts.size() < 3) return pts;
    std::vector<Eigen::Vector2d> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

bool in_hull(const std::vector<Eigen::Vector2d>& hull, const Eigen::Vector2d& p, double tol) {
    if (hull.size() == 1) return (p - hull[0]).norm() <= tol;
    if (hull.size() == 2) {
        // distance to the segment
        const Eigen::Vector2d d = hull[1] - hull[0];
        const double t = std::clamp((p - hull[0]).dot(d) / d.squaredNorm(), 0.0, 1.0);
        return (p - (hull[0] + t * d)).norm() <= tol;
    }
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Eigen::Vector2d& a = hull[i];
        const Eigen::Vector2d& b = hull[(i + 1) % hull.size()];
        const double cr = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
        if (cr < -tol) return false;
    }
    return true;
}

}  // namespace

Dq current_reference(const Dq& v_ref, const Dq& v_meas, const Dq& i_out,
                     const PiGains& gains, PiState& state, double c_i, double omega_g,
                     double tau_s) {
    const double err_d = v_ref.d - v_meas.d;
    const double err_q = v_ref.q - v_meas.q;
    state.acc_d = clamp_sym(state.acc_d + gains.k_i * err_d * tau_s, gains.limit);
    state.acc_q = clamp_sym(state.acc_q + gains.k_i * err_q * tau_s, gains.limit);
    // J v = (v_q, -v_d)
    Dq out;
    out.d = i_out.d - omega_g * c_i * v_meas.q + gains.k_p * err_d + state.acc_d;
    out.q = i_out.q + omega_g * c_i * v_meas.d + gains.k_p * err_q + state.acc_q;
    return out;
}

ControlSet control_set(double v_dc, double theta) {
    if (!(v_dc > 0.0)) throw ConfigError("v_dc must be positive");
    ControlSet set;
    set.v_dc = v_dc;
    set.theta = theta;
    constexpr double kTwoThirdsPi = 2.0943951023931954923084289221863;
    for (int idx = 0; idx < 8; ++idx) {
        const SwitchState s = SwitchState::from_index(idx);
        // alpha-beta space vector of the leg states
        const double alpha =
            (2.0 / 3.0) * (s.a + s.b * std::cos(kTwoThirdsPi) + s.c * std::cos(2 * kTwoThirdsPi));
        const double beta =
            (2.0 / 3.0) * (s.b * std::sin(kTwoThirdsPi) + s.c * std::sin(2 * kTwoThirdsPi));
        // dq at angle theta, q lagging d
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        set.vectors[idx].d = v_dc * (alpha * ct + beta * st);
        set.vectors[idx].q = v_dc * (alpha * st - beta * ct);
    }
    return set;
}

Dq predict_local(const Dq& i_meas, const Dq& v_meas, const Dq& u, const IbrParams& ibr,
                 double omega_g, double tau_s) {
    const double wl = omega_g * ibr.l;
    // J i = (i_q, -i_d)
    Dq out;
    out.d = i_meas.d + (tau_s / ibr.l) * (u.d - v_meas.d - ibr.r * i_meas.d - wl * i_meas.q);
    out.q = i_meas.q + (tau_s / ibr.l) * (u.q - v_meas.q - ibr.r * i_meas.q + wl * i_meas.d);
    return out;
}

Selection select_switch(const Dq& i_ref, const Dq& i_meas, const Dq& v_meas,
                        const Dq& v_ref, const ControlSet& set, const IbrParams& ibr,
                        double omega_g, double tau_s, const CostWeights& weights,
                        int prev_index) {
    // v(k+1) under one-step Euler does not depend on u; evaluate the voltage
    // term once from the locally known capacitor dynamics.
    const double vpred_d =
        v_meas.d + tau_s * (-omega_g * v_meas.q + i_meas.d / ibr.c);
    const double vpred_q =
        v_meas.q + tau_s * (omega_g * v_meas.d + i_meas.q / ibr.c);
    const double dv_d = v_ref.d - vpred_d;
    const double dv_q = v_ref.q - vpred_q;
    const double v_term = weights.w_v * (dv_d * dv_d + dv_q * dv_q);

    Selection best{0, std::numeric_limits<double>::infinity()};
    for (int idx = 0; idx < 8; ++idx) {
        const Dq ip = predict_local(i_meas, v_meas, set.vectors[idx], ibr, omega_g, tau_s);
        const double ed = i_ref.d - ip.d;
        const double eq = i_ref.q - ip.q;
        const double cost = weights.w_i * (ed * ed + eq * eq) + v_term;
        if (cost < best.cost || (cost == best.cost && idx == prev_index)) {
            best = {idx, cost};
        }
    }
    if (!std::isfinite(best.cost)) {
        throw SimulationDiverged(std::numeric_limits<double>::quiet_NaN(),
                                 (Eigen::VectorXd(2) << i_meas.d, i_meas.q).finished());
    }
    return best;
}

int nearest_vector(const ControlSet& set, const Dq& target) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < 8; ++idx) {
        const double dd = target.d - set.vectors[idx].d;
        const double dq = target.q - set.vectors[idx].q;
        const double d2 = dd * dd + dq * dq;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = idx;
        }
    }
    return best;
}

double quantization_error(const ControlSet& set, double resolution) {
    if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(8);
    for (const auto& v : set.vectors) pts.push_back(v.vec());
    const auto hull = convex_hull(pts);
    if (hull.size() <= 1) return 0.0;

    Eigen::Vector2d lo = hull[0], hi = hull[0];
    for (const auto& p : hull) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const int nx = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / resolution)));
    const int ny = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / resolution)));
    const double tol = 1e-9 * std::max(1.0, (hi - lo).norm());

    double worst = 0.0;
    for (int ix = 0; ix <= nx; ++ix) {
        for (int iy = 0; iy <= ny; ++iy) {
            const Eigen::Vector2d p{lo.x() + (hi.x() - lo.x()) * ix / nx,
                                    lo.y() + (hi.y() - lo.y()) * iy / ny};
            if (!in_hull(hull, p, tol)) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& v : pts) best = std::min(best, (p - v).norm());
            worst = std::max(worst, best);
        }
    }
    return worst;
}

std::vector<int> select_switch_centralized(const MicrogridModel& model,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& i_l,
                                           const std::vector<Dq>& i_ref,
                                           const std::vector<ControlSet>& sets,
                                           const CostWeights& weights,
                                           const std::vector<int>& prev) {
    const int n = model.layout.n;
    if (static_cast<int>(i_ref.size()) != n || static_cast<int>(sets.size()) != n) {
        throw ConfigError("centralized selection needs one reference and set per IBR");
    }
    long combos = 1;
    for (int i = 0; i < n; ++i) combos *= 8;

    std::vector<int> best(n, 0);
    double best_cost = std::numeric_limits<double>::infinity();
    Eigen::VectorXd u(2 * n);
    std::vector<int> pick(n);
    for (long c = 0; c < combos; ++c) {
        long rem = c;
        for (int i = 0; i < n; ++i) {
            pick[i] = static_cast<int>(rem % 8);
            rem /= 8;
            u[i] = sets[i].vectors[pick[i]].d;
            u[n + i] = sets[i].vectors[pick[i]].q;
        }
        const Eigen::VectorXd xn = model.A_d * x + model.B_d * u + model.E_d * i_l;
        double cost = 0.0;
        for (int i = 0; i < n; ++i) {
            const double ed = i_ref[i].d - xn[model.layout.id(i)];
            const double eq = i_ref[i].q - xn[model.layout.iq(i)];
            cost += weights.w_i * (ed * ed + eq * eq);
        }
        const bool tie_pref = cost == best_cost && !prev.empty() && pick == prev;
        if (cost < best_cost || tie_pref) {
            best_cost = cost;
            best = pick;
        }
    }
    return best;
}

}  // namespace mgsim

#pragma once

#include <utility>
#include <vector>

#include "mgsim/frames.hpp"

namespace mgsim {

/// P-f and Q-V droop coefficients of one IBR. v_nom is the peak phase
/// amplitude (sqrt(2) times the rms rating).
struct DroopParams {
    double m_p = 0.0;      // rad/s per W
    double n_q = 0.0;      // V per var
    double v_nom = 0.0;    // V peak
    double omega_g = 0.0;  // rad/s
};

/// First-order low-pass states for the measured powers. The raw values ripple
/// at the switching frequency; the filtered ones feed the droop laws.
struct PowerFilter {
    double p_filt = 0.0;
    double q_filt = 0.0;
    double omega_c = 0.0;  // rad/s cutoff; omega_c * tau_s <= 1
};

/// Droop outputs plus the integrated phase offset from the common frame,
/// wrapped to (-pi, pi].
struct DroopState {
    double omega_i = 0.0;
    double v_i = 0.0;
    double delta_i = 0.0;
};

struct PQ {
    double p = 0.0;
    double q = 0.0;
};

/// P = 3/2 v^T i, Q = 3/2 v^T J i, i.e. Q = 1.5 (v_d i_q - v_q i_d); positive
/// Q for an inductive (lagging) current under the q-lags-d convention.
PQ instantaneous_power(const Dq& v, const Dq& i);

/// Euler update x += tau_s * omega_c * (raw - x) on both channels.
void lowpass_step(PowerFilter& f, double p_raw, double q_raw, double tau_s);

/// omega_i = omega_g - m_p P, v_i = v_nom - n_q Q.
std::pair<double, double> droop_law(double p_filt, double q_filt, const DroopParams& params);

/// delta' = wrap(delta + (omega_i - omega_g) * tau_s).
double integrate_angle(double delta_i, double omega_i, double omega_g, double tau_s);

/// Closed-form sharing targets: P_i proportional to 1/m_pi with sum P_total,
/// so that m_p1 P_1 = ... = m_pn P_n.
std::vector<double> expected_sharing(const std::vector<double>& m_p, double p_total);

}  // namespace mgsim

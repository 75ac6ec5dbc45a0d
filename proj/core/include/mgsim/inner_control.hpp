#pragma once

#include <array>
#include <vector>

#include "mgsim/frames.hpp"
#include "mgsim/plant.hpp"

namespace mgsim {

/// Voltage-loop PI gains. The integrator is clamped per axis.
struct PiGains {
    double k_p = 0.0;   // A/V
    double k_i = 0.0;   // A/(V*s)
    double limit = 0.0; // A
};

struct PiState {
    double acc_d = 0.0;
    double acc_q = 0.0;
};

/// Leg states of a two-level three-phase bridge. Index encoding: bit 0 = a,
/// bit 1 = b, bit 2 = c.
struct SwitchState {
    bool a = false;
    bool b = false;
    bool c = false;

    int index() const { return (a ? 1 : 0) | (b ? 2 : 0) | (c ? 4 : 0); }
    static SwitchState from_index(int idx) {
        return {(idx & 1) != 0, (idx & 2) != 0, (idx & 4) != 0};
    }
};

/// The 8 candidate inverter voltage vectors in dq at a given electrical
/// angle. States 0 and 7 map to the zero vector; the 6 active vectors have
/// magnitude (2/3) V_dc and are spaced 60 degrees apart.
struct ControlSet {
    double v_dc = 0.0;
    double theta = 0.0;
    std::array<Dq, 8> vectors{};  // indexed by SwitchState::index()
};

/// Current reference from the voltage loop:
///   i_ref = i_out - omega_g c_i J v + K_p (v_ref - v) + acc,
/// with acc += K_i (v_ref - v) tau_s clamped per axis. i_out is the measured
/// filter output current (the same current the droop powers use).
Dq current_reference(const Dq& v_ref, const Dq& v_meas, const Dq& i_out,
                     const PiGains& gains, PiState& state, double c_i, double omega_g,
                     double tau_s);

/// Candidate vectors: space vector (2/3)(S_a + S_b e^{j2pi/3} + S_c e^{j4pi/3})
/// scaled by V_dc and expressed in the dq frame at angle theta.
ControlSet control_set(double v_dc, double theta);

/// One-step Euler prediction of the local filter current:
///   i(k+1) = i + (tau_s / l) (u - v - r i - omega_g l J i),
/// sign-identical to the filter rows of the assembled plant.
Dq predict_local(const Dq& i_meas, const Dq& v_meas, const Dq& u, const IbrParams& ibr,
                 double omega_g, double tau_s);

struct CostWeights {
    double w_i = 1.0;
    double w_v = 0.0;
};

struct Selection {
    int index = 0;
    double cost = 0.0;
};

/// Exhaustive one-step argmin over the 8 candidates of
///   w_i ||i_ref - i_pred(u)||^2 + w_v ||v_ref - v_pred||^2.
/// v_pred is control-invariant under one-step Euler, so w_v cannot change the
/// argmin; it is kept configurable. Cost ties prefer prev_index, then the
/// lowest candidate index. Throws SimulationDiverged on non-finite costs.
Selection select_switch(const Dq& i_ref, const Dq& i_meas, const Dq& v_meas,
                        const Dq& v_ref, const ControlSet& set, const IbrParams& ibr,
                        double omega_g, double tau_s, const CostWeights& weights,
                        int prev_index);

/// Index of the set vector nearest to a target (ties to the lowest index).
int nearest_vector(const ControlSet& set, const Dq& target);

/// Covering radius of the candidate vectors over their convex hull: the
/// largest distance from any hull point (sampled on a grid of spacing at most
/// `resolution`) to the nearest candidate.
double quantization_error(const ControlSet& set, double resolution);

/// Joint argmin over all 8^n switch-state combinations using the full
/// discrete plant model; verification oracle for the per-IBR selection
/// (intended for n <= 3). References and sets are in the common frame.
std::vector<int> select_switch_centralized(const MicrogridModel& model,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& i_l,
                                           const std::vector<Dq>& i_ref,
                                           const std::vector<ControlSet>& sets,
                                           const CostWeights& weights,
                                           const std::vector<int>& prev);

}  // namespace mgsim

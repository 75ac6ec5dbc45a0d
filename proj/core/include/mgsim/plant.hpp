#pragma once

#include <Eigen/Core>
#include <limits>
#include <utility>
#include <vector>

#include "mgsim/errors.hpp"

namespace mgsim {

/// LC output filter of one inverter plus its DC link.
struct IbrParams {
    double r = 0.0;     // filter resistance, ohm
    double l = 0.0;     // filter inductance, H
    double c = 0.0;     // filter capacitance, F
    double v_dc = 0.0;  // DC link voltage, V

    void validate() const;  // all strictly positive
};

/// Series R-L transmission line between two IBR buses.
struct LineParams {
    double r_t = 0.0;  // ohm
    double l_t = 0.0;  // H

    void validate() const;
    /// omega_g * l_t > r_t; a violated check is a warning, not an error.
    bool inductance_dominant(double omega_g) const { return omega_g * l_t > r_t; }
};

/// IBR interconnection graph. Edges are ordered 1-based (from, to) pairs.
struct Topology {
    int n_ibr = 0;
    std::vector<std::pair<int, int>> edges;

    int n_lines() const { return static_cast<int>(edges.size()); }
    void validate() const;
};

/// Constant-impedance load at a bus, sized from rated apparent power, with
/// an activation window [t_on, t_off).
struct LoadSpec {
    int bus = 1;  // 1-based
    double p_rated = 0.0;  // W at rated voltage
    double q_rated = 0.0;  // var at rated voltage
    double t_on = 0.0;
    double t_off = std::numeric_limits<double>::infinity();

    bool active_at(double t) const { return t >= t_on && t < t_off; }
};

/// Index map for the stacked state vector
/// [v_d(1..n), v_q(1..n), i_d(1..n), i_q(1..n), i_td(1..m), i_tq(1..m)].
struct StateLayout {
    int n = 0;  // IBR count
    int m = 0;  // line count

    int dim() const { return 4 * n + 2 * m; }
    int vd(int i) const { return i; }            // 0-based IBR index
    int vq(int i) const { return n + i; }
    int id(int i) const { return 2 * n + i; }
    int iq(int i) const { return 3 * n + i; }
    int itd(int k) const { return 4 * n + k; }   // 0-based line index
    int itq(int k) const { return 4 * n + m + k; }
};

/// Continuous and forward-Euler-discretized dq state-space model of the
/// coupled filter/line network. Outputs y = [v_dq; i_dq] (first 4n states).
struct MicrogridModel {
    StateLayout layout;
    double omega_g = 0.0;
    std::vector<IbrParams> ibrs;
    std::vector<LineParams> lines;
    Eigen::MatrixXd incidence;        // n x m
    Eigen::MatrixXd A, B, E, C;       // continuous
    Eigen::MatrixXd A_d, B_d, E_d;    // A_d = I + A*tau_s, B_d = B*tau_s, E_d = E*tau_s
    double tau_s = 0.0;
};

/// Signed incidence matrix: column k carries +1 at the edge start row and -1
/// at the edge end row. Every column sums to zero.
Eigen::MatrixXd incidence_matrix(const Topology& topo);

/// Build the continuous A, B, E, C for n IBR filters, m lines, and the bus
/// load-current disturbance input. Loads are not part of A; they enter
/// through E as measured currents.
MicrogridModel assemble(const std::vector<IbrParams>& ibrs,
                        const std::vector<LineParams>& lines,
                        const Topology& topo,
                        double omega_g);

/// Forward-Euler discretization at step tau_s: A_d = I + A*tau_s exactly.
void discretize(MicrogridModel& model, double tau_s);

/// Series R-X dq admittance of a load: Z = R*I + X*J with
/// R = |V|^2 P / |S|^2, X = |V|^2 Q / |S|^2, Y = Z^-1, i_L = Y * v_dq.
/// |S| = 0 yields the zero matrix (no load).
Eigen::Matrix2d load_admittance(const LoadSpec& spec, double v_rated_rms);

/// Active loads mapped onto buses. Admittances are sized once at
/// construction; currents are evaluated quasi-statically from the bus
/// voltages at a given time.
class LoadBank {
  public:
    LoadBank() = default;
    /// v_sizing_rms is the voltage the rated powers refer to in the dq
    /// single-line equivalent; callers building a three-phase scenario pass
    /// sqrt(3) * (line-to-neutral rms) so a load draws its rated three-phase
    /// power at nominal bus voltage.
    LoadBank(std::vector<LoadSpec> specs, double v_sizing_rms, int n_ibr);

    /// Stacked [i_Ld(1..n); i_Lq(1..n)] for the loads active at time t.
    Eigen::VectorXd currents(const Eigen::VectorXd& x, const StateLayout& layout, double t) const;

    /// Sum of active load admittances at one bus (1-based).
    Eigen::Matrix2d bus_admittance(int bus, double t) const;

    const std::vector<LoadSpec>& specs() const { return specs_; }
    bool empty() const { return specs_.empty(); }

  private:
    std::vector<LoadSpec> specs_;
    std::vector<Eigen::Matrix2d> admittances_;
    int n_ibr_ = 0;
};

/// One forward-Euler step triple at step h (shared by discretize and the
/// sub-stepped plant integrator so both produce bit-identical matrices).
struct EulerMatrices {
    Eigen::MatrixXd A_d, B_d, E_d;
};
EulerMatrices euler_matrices(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& E, double h);

/// Energy moved during plant steps, integrated with the same left-endpoint
/// quadrature the Euler update uses.
struct StepFlux {
    double e_inverter = 0.0;  // integral of 1.5 u^T i
    double e_load = 0.0;      // integral of 1.5 v^T i_L over all buses
    double e_loss = 0.0;      // integral of ohmic losses in filters and lines
};

/// Stored energy 3/4 (i^T L i + v^T C v + i_t^T L_t i_t); the 3/2 factor is
/// the amplitude-invariant dq power convention, the 1/2 the usual quadratic.
double stored_energy(const MicrogridModel& model, const Eigen::VectorXd& x);

/// Advance the plant by one controller period tau_s using `substeps` Euler
/// sub-intervals with u held and the load currents re-evaluated from the bus
/// voltages at each sub-interval. substeps = 1 reproduces the one-step
/// discrete model exactly. Throws SimulationDiverged on non-finite states.
class PlantStepper {
  public:
    PlantStepper(const MicrogridModel& model, int substeps);

    Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                         const LoadBank& loads, double t, StepFlux* flux = nullptr) const;

    int substeps() const { return substeps_; }
    double substep_h() const { return h_; }

  private:
    const MicrogridModel* model_;
    EulerMatrices sub_;
    int substeps_ = 1;
    double h_ = 0.0;
};

/// Convenience one-shot form of PlantStepper::step.
Eigen::VectorXd step_plant(const MicrogridModel& model, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& u, const LoadBank& loads, double t,
                           int substeps);

}  // namespace mgsim

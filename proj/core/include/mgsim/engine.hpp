#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgsim/scenario.hpp"

namespace mgsim {

/// Uniformly sampled run record. Per IBR the columns are the three-phase
/// filter output currents, the capacitor voltage in the IBR's own droop
/// frame, the filtered powers, frequency, phase offset, and the applied
/// switch-state index; per line the dq current in the common frame.
/// The side vectors carry the energy bookkeeping of each logged interval
/// (inverter input, load, ohmic loss, absolute stored energy at the sample).
struct TimeSeriesLog {
    int n = 0;
    int m = 0;
    std::vector<std::string> columns;
    std::vector<double> data;  // row-major, rows() x columns.size()
    std::vector<double> e_inverter, e_load, e_loss, e_stored;

    std::size_t cols() const { return columns.size(); }
    std::size_t rows() const { return columns.empty() ? 0 : data.size() / columns.size(); }
    double at(std::size_t row, std::size_t col) const { return data[row * cols() + col]; }

    std::size_t col_time() const { return 0; }
    std::size_t ibr_base(int i) const { return 1 + 10 * static_cast<std::size_t>(i); }
    std::size_t col_ia(int i) const { return ibr_base(i) + 0; }
    std::size_t col_ib(int i) const { return ibr_base(i) + 1; }
    std::size_t col_ic(int i) const { return ibr_base(i) + 2; }
    std::size_t col_vd(int i) const { return ibr_base(i) + 3; }
    std::size_t col_vq(int i) const { return ibr_base(i) + 4; }
    std::size_t col_p(int i) const { return ibr_base(i) + 5; }
    std::size_t col_q(int i) const { return ibr_base(i) + 6; }
    std::size_t col_f(int i) const { return ibr_base(i) + 7; }
    std::size_t col_delta(int i) const { return ibr_base(i) + 8; }
    std::size_t col_sw(int i) const { return ibr_base(i) + 9; }
    std::size_t col_itd(int k) const { return 1 + 10 * static_cast<std::size_t>(n) + 2 * k; }
    std::size_t col_itq(int k) const { return col_itd(k) + 1; }

    /// First row index with time >= t (rows() if none).
    std::size_t row_at(double t) const;
};

/// Run the closed loop: per control step measure, rotate into each IBR's
/// droop frame, update power filter + droop + PI reference, select the
/// switch state, then advance the plant with held u over `substeps`
/// sub-intervals. Deterministic: identical scenarios produce identical logs.
TimeSeriesLog run(const Scenario& scenario);

/// Steady-window metrics. sharing_error is the max relative spread of
/// m_p,i * P_i around its mean; v_ripple is the relative rms deviation of the
/// voltage amplitude within the window.
struct WindowSummary {
    double t0 = 0.0;
    double t1 = 0.0;
    std::size_t samples = 0;
    std::vector<double> mean_p, mean_q, mean_f, mean_v_amp, v_ripple;
    std::vector<double> mean_i_amp;  // filter output current amplitude
    double sharing_error = 0.0;
};

WindowSummary summarize(const Scenario& scenario, const TimeSeriesLog& log, double t0,
                        double t1);

}  // namespace mgsim

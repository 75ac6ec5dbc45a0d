#include "mgsim/engine.hpp"

#include <algorithm>
#include <cmath>

#include "mgsim/errors.hpp"
#include "mgsim/frames.hpp"

namespace mgsim {

void Scenario::validate() const {
    topology.validate();
    const int n = topology.n_ibr;
    if (static_cast<int>(ibrs.size()) != n) throw ConfigError("need one IBR parameter set per bus");
    if (static_cast<int>(droop.size()) != n) throw ConfigError("need one droop parameter set per bus");
    if (static_cast<int>(lines.size()) != topology.n_lines()) {
        throw ConfigError("need one line parameter set per edge");
    }
    for (const auto& p : ibrs) p.validate();
    for (const auto& p : lines) p.validate();
    for (const auto& d : droop) {
        // zero coefficients disable droop (used by the steady-state oracle's
        // closed-form checks); negative ones are invalid
        if (d.m_p < 0.0 || d.n_q < 0.0 || !(d.v_nom > 0.0)) {
            throw ConfigError("droop coefficients must be non-negative and v_nom positive");
        }
    }
    for (const auto& l : loads) {
        if (l.bus < 1 || l.bus > n) throw ConfigError("load bus out of range");
        if (l.p_rated < 0.0) throw ConfigError("load active power must be non-negative");
        if (!(l.t_off > l.t_on)) throw ConfigError("load window must satisfy t_off > t_on");
    }
    if (!(v_rated_rms > 0.0)) throw ConfigError("rated voltage must be positive");
    if (!(omega_g > 0.0)) throw ConfigError("grid frequency must be positive");
    if (!(tau_s > 0.0)) throw ConfigError("tau_s must be positive");
    if (substeps < 1) throw ConfigError("substeps must be >= 1");
    if (!(duration > 0.0)) throw ConfigError("duration must be positive");
    if (log_decimation < 1) throw ConfigError("log decimation must be >= 1");
    if (!(pi.limit > 0.0)) throw ConfigError("PI integrator limit must be positive");
    if (pi.k_p < 0.0 || pi.k_i < 0.0) throw ConfigError("PI gains must be non-negative");
    if (power_filter_cutoff * tau_s > 1.0) {
        throw ConfigError("power filter cutoff too high: omega_c * tau_s must be <= 1");
    }
}

std::vector<std::string> Scenario::warnings() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        if (!lines[k].inductance_dominant(omega_g)) {
            out.push_back("line " + std::to_string(k + 1) +
                          " is not inductance-dominant (omega_g*l_t = " +
                          std::to_string(omega_g * lines[k].l_t) +
                          " <= r_t = " + std::to_string(lines[k].r_t) + ")");
        }
    }
    return out;
}

Scenario Scenario::table1() {
    Scenario s;
    s.v_rated_rms = 220.0;
    s.omega_g = 2.0 * M_PI * 50.0;
    s.topology = Topology{3, {{1, 2}, {2, 3}}};
    s.ibrs.assign(3, IbrParams{0.2, 3.5e-3, 50e-6, 600.0});
    s.lines.assign(2, LineParams{0.2, 0.3e-3});
    const double v_nom = s.v_nom_peak();
    s.droop.assign(3, DroopParams{6e-5, 4e-3, v_nom, s.omega_g});
    s.loads = {
        LoadSpec{1, 1000.0, 200.0},
        LoadSpec{2, 1000.0, 200.0},
        LoadSpec{3, 3000.0, 200.0},
        LoadSpec{3, 2000.0, 200.0, 1.0, 3.0},
    };
    s.pi = PiGains{0.15, 30.0, 30.0};
    s.power_filter_cutoff = 2.0 * M_PI * 100.0;
    s.tau_s = 1e-4;
    s.substeps = 50;
    s.duration = 4.0;
    s.log_decimation = 10;
    return s;
}

std::size_t TimeSeriesLog::row_at(double t) const {
    const std::size_t nrows = rows();
    for (std::size_t r = 0; r < nrows; ++r) {
        if (at(r, col_time()) >= t) return r;
    }
    return nrows;
}

namespace {

std::vector<std::string> make_columns(int n, int m) {
    std::vector<std::string> cols;
    cols.reserve(1 + 10 * n + 2 * m);
    cols.push_back("time_s");
    for (int i = 1; i <= n; ++i) {
        const std::string p = "ibr" + std::to_string(i) + "_";
        cols.push_back(p + "ia_A");
        cols.push_back(p + "ib_A");
        cols.push_back(p + "ic_A");
        cols.push_back(p + "vd_V");
        cols.push_back(p + "vq_V");
        cols.push_back(p + "P_W");
        cols.push_back(p + "Q_var");
        cols.push_back(p + "f_Hz");
        cols.push_back(p + "delta_rad");
        cols.push_back(p + "sw_idx");
    }
    for (int k = 1; k <= m; ++k) {
        const std::string p = "line" + std::to_string(k) + "_";
        cols.push_back(p + "itd_A");
        cols.push_back(p + "itq_A");
    }
    return cols;
}

}  // namespace

TimeSeriesLog run(const Scenario& sc) {
    sc.validate();
    const int n = sc.topology.n_ibr;
    const int m = sc.topology.n_lines();

    MicrogridModel model = assemble(sc.ibrs, sc.lines, sc.topology, sc.omega_g);
    discretize(model, sc.tau_s);
    const PlantStepper stepper(model, sc.substeps);
    const LoadBank loads(sc.loads, sc.load_sizing_rms(), n);
    const auto& lay = model.layout;

    TimeSeriesLog log;
    log.n = n;
    log.m = m;
    log.columns = make_columns(n, m);

    // capacitors pre-charged to the nominal voltage in the common frame
    Eigen::VectorXd x = Eigen::VectorXd::Zero(lay.dim());
    for (int i = 0; i < n; ++i) x[lay.vd(i)] = sc.v_nom_peak();

    std::vector<PowerFilter> filt(n, PowerFilter{0.0, 0.0, sc.power_filter_cutoff});
    std::vector<PiState> pi_state(n);
    std::vector<double> delta(n, 0.0);
    std::vector<double> omega_i(n, sc.omega_g);
    std::vector<int> prev_sw(n, 0);
    // band-limited output-current feedforward for the voltage loop; feeding
    // the raw output current back through the one-step current tracker pumps
    // the weakly damped line-capacitor resonances
    std::vector<Dq> i_f_filt(n, Dq{0.0, 0.0});
    double theta_c = 0.0;

    const long steps = std::lround(sc.duration / sc.tau_s);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n);
    StepFlux flux;

    for (long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * sc.tau_s;
        const Eigen::VectorXd il = loads.currents(x, lay, t);

        struct PerIbr {
            Dq i_f_common;
            Dq v_local;
        };
        std::vector<PerIbr> meas(n);

        for (int i = 0; i < n; ++i) {
            const Dq v{x[lay.vd(i)], x[lay.vq(i)]};
            const Dq i_ind{x[lay.id(i)], x[lay.iq(i)]};
            // filter output current: load draw minus what the lines bring in
            double bf_d = 0.0, bf_q = 0.0;
            for (int kk = 0; kk < m; ++kk) {
                const double b = model.incidence(i, kk);
                if (b == 0.0) continue;
                bf_d += b * x[lay.itd(kk)];
                bf_q += b * x[lay.itq(kk)];
            }
            const Dq i_f{il[i] - bf_d, il[n + i] - bf_q};

            const Dq vm = rotate(v, -delta[i]);
            const Dq im = rotate(i_ind, -delta[i]);
            const Dq ifm = rotate(i_f, -delta[i]);

            const PQ pq = instantaneous_power(vm, ifm);
            lowpass_step(filt[i], pq.p, pq.q, sc.tau_s);
            const auto [w_i, v_i] = droop_law(filt[i].p_filt, filt[i].q_filt, sc.droop[i]);
            omega_i[i] = w_i;

            const double a = sc.tau_s * sc.power_filter_cutoff;
            i_f_filt[i].d += a * (ifm.d - i_f_filt[i].d);
            i_f_filt[i].q += a * (ifm.q - i_f_filt[i].q);

            const Dq v_ref{v_i, 0.0};
            const Dq i_ref = current_reference(v_ref, vm, i_f_filt[i], sc.pi, pi_state[i],
                                               sc.ibrs[i].c, sc.omega_g, sc.tau_s);
            const ControlSet set = control_set(sc.ibrs[i].v_dc, wrap_angle(theta_c + delta[i]));
            const Selection sel = select_switch(i_ref, im, vm, v_ref, set, sc.ibrs[i],
                                                sc.omega_g, sc.tau_s, sc.weights, prev_sw[i]);
            prev_sw[i] = sel.index;

            const Dq u_common = rotate(set.vectors[sel.index], delta[i]);
            u[i] = u_common.d;
            u[n + i] = u_common.q;

            meas[i] = PerIbr{i_f, vm};
        }

        if (k % sc.log_decimation == 0) {
            log.data.push_back(t);
            for (int i = 0; i < n; ++i) {
                const ThreePhase iabc = dq_to_abc(meas[i].i_f_common, theta_c);
                log.data.push_back(iabc.a);
                log.data.push_back(iabc.b);
                log.data.push_back(iabc.c);
                log.data.push_back(meas[i].v_local.d);
                log.data.push_back(meas[i].v_local.q);
                log.data.push_back(filt[i].p_filt);
                log.data.push_back(filt[i].q_filt);
                log.data.push_back(omega_i[i] / (2.0 * M_PI));
                log.data.push_back(delta[i]);
                log.data.push_back(static_cast<double>(prev_sw[i]));
            }
            for (int kk = 0; kk < m; ++kk) {
                log.data.push_back(x[lay.itd(kk)]);
                log.data.push_back(x[lay.itq(kk)]);
            }
            log.e_inverter.push_back(flux.e_inverter);
            log.e_load.push_back(flux.e_load);
            log.e_loss.push_back(flux.e_loss);
            log.e_stored.push_back(stored_energy(model, x));
            flux = StepFlux{};
        }

        x = stepper.step(x, u, loads, t, &flux);

        for (int i = 0; i < n; ++i) {
            delta[i] = integrate_angle(delta[i], omega_i[i], sc.omega_g, sc.tau_s);
        }
        theta_c = wrap_angle(theta_c + sc.omega_g * sc.tau_s);
    }
    return log;
}

WindowSummary summarize(const Scenario& sc, const TimeSeriesLog& log, double t0, double t1) {
    if (!(t1 > t0)) throw ConfigError("summary window must satisfy t1 > t0");
    const std::size_t r0 = log.row_at(t0);
    const std::size_t r1 = log.row_at(t1);
    if (r0 >= r1) throw ConfigError("summary window is empty");

    const int n = log.n;
    WindowSummary s;
    s.t0 = t0;
    s.t1 = t1;
    s.samples = r1 - r0;
    s.mean_p.assign(n, 0.0);
    s.mean_q.assign(n, 0.0);
    s.mean_f.assign(n, 0.0);
    s.mean_v_amp.assign(n, 0.0);
    s.v_ripple.assign(n, 0.0);
    s.mean_i_amp.assign(n, 0.0);

    for (std::size_t r = r0; r < r1; ++r) {
        for (int i = 0; i < n; ++i) {
            s.mean_p[i] += log.at(r, log.col_p(i));
            s.mean_q[i] += log.at(r, log.col_q(i));
            s.mean_f[i] += log.at(r, log.col_f(i));
            s.mean_v_amp[i] += std::hypot(log.at(r, log.col_vd(i)), log.at(r, log.col_vq(i)));
            const double ia = log.at(r, log.col_ia(i));
            const double ib = log.at(r, log.col_ib(i));
            const double ic = log.at(r, log.col_ic(i));
            s.mean_i_amp[i] += std::sqrt((2.0 / 3.0) * (ia * ia + ib * ib + ic * ic));
        }
    }
    const double inv = 1.0 / static_cast<double>(s.samples);
    for (int i = 0; i < n; ++i) {
        s.mean_p[i] *= inv;
        s.mean_q[i] *= inv;
        s.mean_f[i] *= inv;
        s.mean_v_amp[i] *= inv;
        s.mean_i_amp[i] *= inv;
    }
    for (std::size_t r = r0; r < r1; ++r) {
        for (int i = 0; i < n; ++i) {
            const double amp =
                std::hypot(log.at(r, log.col_vd(i)), log.at(r, log.col_vq(i)));
            const double dev = amp - s.mean_v_amp[i];
            s.v_ripple[i] += dev * dev;
        }
    }
    for (int i = 0; i < n; ++i) {
        s.v_ripple[i] = std::sqrt(s.v_ripple[i] * inv) / s.mean_v_amp[i];
    }

    double mean_mp = 0.0;
    for (int i = 0; i < n; ++i) mean_mp += sc.droop[i].m_p * s.mean_p[i];
    mean_mp /= n;
    if (mean_mp != 0.0) {
        for (int i = 0; i < n; ++i) {
            s.sharing_error = std::max(
                s.sharing_error, std::abs(sc.droop[i].m_p * s.mean_p[i] - mean_mp) /
                                     std::abs(mean_mp));
        }
    }
    return s;
}

}  // namespace mgsim

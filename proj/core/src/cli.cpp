#include "mgsim/cli.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "mgsim/config.hpp"
#include "mgsim/csv.hpp"
#include "mgsim/engine.hpp"
#include "mgsim/errors.hpp"
#include "mgsim/stability.hpp"
#include "mgsim/steady_state.hpp"

namespace mgsim {

namespace {

void print_kv(std::ostream& out, const std::string& key, double value) {
    out << key << " = " << format_csv_value(value) << "\n";
}

void print_kv(std::ostream& out, const std::string& key, const std::string& value) {
    out << key << " = " << value << "\n";
}

void apply_overrides(Scenario& sc, const RunOptions& opt) {
    if (opt.duration) sc.duration = *opt.duration;
    if (opt.substeps) sc.substeps = *opt.substeps;
    if (opt.log_rate_hz) {
        sc.log_decimation =
            static_cast<int>(std::max(1L, std::lround(1.0 / (sc.tau_s * *opt.log_rate_hz))));
    }
}

void print_window_summary(std::ostream& out, const std::string& tag, const WindowSummary& s) {
    print_kv(out, tag + ".t0_s", s.t0);
    print_kv(out, tag + ".t1_s", s.t1);
    for (std::size_t i = 0; i < s.mean_p.size(); ++i) {
        const std::string p = tag + ".ibr" + std::to_string(i + 1);
        print_kv(out, p + ".P_W", s.mean_p[i]);
        print_kv(out, p + ".Q_var", s.mean_q[i]);
        print_kv(out, p + ".f_Hz", s.mean_f[i]);
        print_kv(out, p + ".v_peak_V", s.mean_v_amp[i]);
        print_kv(out, p + ".v_ripple_rel", s.v_ripple[i]);
        print_kv(out, p + ".i_peak_A", s.mean_i_amp[i]);
    }
    print_kv(out, tag + ".sharing_error_rel", s.sharing_error);
}

void emit_gnuplot(const std::string& csv_path, int n) {
    std::ofstream g(csv_path + ".gp");
    if (!g) throw ConfigError("cannot write gnuplot script: " + csv_path + ".gp");
    g << "# companion plotting script for " << csv_path << "\n";
    g << "set datafile separator ','\n";
    g << "set key autotitle columnhead\n";
    g << "set xlabel 'time [s]'\n";
    g << "set terminal pngcairo size 1200,900\n";
    g << "set output '" << csv_path << ".png'\n";
    g << "set multiplot layout 3,1\n";
    g << "set ylabel 'phase a current [A]'\n";
    g << "plot";
    for (int i = 1; i <= n; ++i) {
        g << (i > 1 ? "," : "") << " '" << csv_path << "' using 1:" << (2 + 10 * (i - 1))
          << " with lines";
    }
    g << "\nset ylabel 'v_d [V]'\nplot";
    for (int i = 1; i <= n; ++i) {
        g << (i > 1 ? "," : "") << " '" << csv_path << "' using 1:" << (5 + 10 * (i - 1))
          << " with lines";
    }
    g << "\nset ylabel 'P [W], f [Hz]'\nplot";
    for (int i = 1; i <= n; ++i) {
        g << (i > 1 ? "," : "") << " '" << csv_path << "' using 1:" << (7 + 10 * (i - 1))
          << " with lines";
    }
    g << "\nunset multiplot\n";
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        ParsedConfig cfg = parse_config(opt.config_path);
        apply_overrides(cfg.scenario, opt);
        for (const auto& nline : cfg.notices) err << "notice: " << nline << "\n";
        for (const auto& w : cfg.scenario.warnings()) err << "warning: " << w << "\n";

        const TimeSeriesLog log = run(cfg.scenario);
        const std::string csv = csv_to_string(log);

        if (opt.seed_check) {
            const TimeSeriesLog log2 = run(cfg.scenario);
            const std::string csv2 = csv_to_string(log2);
            if (csv != csv2) {
                err << "error: seed check failed, reruns differ\n";
                return kExitDivergence;
            }
            print_kv(out, "seed_check", std::string("identical"));
        }

        if (!opt.out_path.empty()) {
            std::ofstream f(opt.out_path, std::ios::binary);
            if (!f) throw ConfigError("cannot open for writing: " + opt.out_path);
            f.write(csv.data(), static_cast<std::streamsize>(csv.size()));
            if (opt.gnuplot_script) emit_gnuplot(opt.out_path, log.n);
        }

        print_kv(out, "rows", static_cast<double>(log.rows()));
        print_kv(out, "duration_s", cfg.scenario.duration);
        struct Window { const char* tag; double t0, t1; };
        const Window windows[] = {{"pre", 0.8, 1.0}, {"during", 2.5, 3.0}, {"post", 3.5, 4.0}};
        bool printed = false;
        for (const auto& w : windows) {
            if (cfg.scenario.duration >= w.t1) {
                print_window_summary(out, w.tag, summarize(cfg.scenario, log, w.t0, w.t1));
                printed = true;
            }
        }
        if (!printed && log.rows() >= 2) {
            // short run: summarize the trailing quarter
            const double t1 = log.at(log.rows() - 1, log.col_time());
            const double t0 = 0.75 * t1;
            print_window_summary(out, "final", summarize(cfg.scenario, log, t0, t1));
        }
        return kExitOk;
    } catch (const SimulationDiverged& e) {
        err << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int cmd_steady(const SteadyOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        ParsedConfig cfg = parse_config(opt.config_path);
        for (const auto& nline : cfg.notices) err << "notice: " << nline << "\n";

        OperatingPoint op;
        if (opt.no_loads) {
            op = steady_state(cfg.scenario, {});
        } else {
            op = steady_state_at(cfg.scenario, opt.at_time.value_or(0.0));
        }

        print_kv(out, "omega_ss_rad_s", op.omega_ss);
        print_kv(out, "f_ss_Hz", op.omega_ss / (2.0 * M_PI));
        for (std::size_t i = 0; i < op.p.size(); ++i) {
            const std::string p = "ibr" + std::to_string(i + 1);
            print_kv(out, p + ".P_W", op.p[i]);
            print_kv(out, p + ".Q_var", op.q[i]);
            print_kv(out, p + ".v_peak_V", op.v_amp[i]);
            print_kv(out, p + ".delta_rad", op.delta[i]);
        }
        print_kv(out, "losses_W", op.losses);
        print_kv(out, "residual", op.residual);
        print_kv(out, "iterations", static_cast<double>(op.iterations));
        for (int s = 0; s < op.x.size(); ++s) {
            print_kv(out, "x_" + std::to_string(s), op.x[s]);
        }
        return kExitOk;
    } catch (const OracleFailure& e) {
        err << "error: " << e.what() << " (residual " << e.residual() << ")\n";
        return kExitOracleFailure;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int cmd_stability(const StabilityOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        ParsedConfig cfg = parse_config(opt.config_path);
        const StabilityConfig& sconf = cfg.stability;
        const bool exact = opt.exact_law || sconf.exact_law;

        QuantizedSystem sys = demo_system(exact ? 0 : sconf.grid_points);
        sys.K(0, 0) = sconf.k_1;
        sys.K(0, 1) = sconf.k_2;

        const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
        const LyapunovCertificate cert = certify(sys, q);

        print_kv(out, "alpha1", cert.alpha1);
        print_kv(out, "alpha2", cert.alpha2);
        print_kv(out, "alpha3", cert.alpha3);
        print_kv(out, "alpha4", cert.alpha4);
        print_kv(out, "L_v", cert.l_v);
        print_kv(out, "z_bar", cert.z_bar);
        print_kv(out, "epsilon", cert.epsilon);
        print_kv(out, "alpha3_over_alpha1", cert.alpha3 / cert.alpha1);
        print_kv(out, "bound_r", cert.bound_r);

        Eigen::VectorXd x0(2);
        x0 << sconf.x0_1, sconf.x0_2;
        const TrajectoryReport rep = verify_trajectory(sys, cert, x0, sconf.steps);
        print_kv(out, "steps", static_cast<double>(rep.steps));
        print_kv(out, "decrease_fraction", rep.decrease_fraction);
        print_kv(out, "max_V", rep.max_v);
        print_kv(out, "limsup_tail", rep.limsup_tail);
        print_kv(out, "within_bound", rep.within_bound ? 1.0 : 0.0);
        print_kv(out, "left_domain", rep.left_domain ? 1.0 : 0.0);
        print_kv(out, "result", std::string(rep.within_bound && !rep.left_domain ? "PASS" : "FAIL"));
        return rep.within_bound && !rep.left_domain ? kExitOk : kExitCertificationFailure;
    } catch (const NotCertifiable& e) {
        err << "error: " << e.what() << "\n";
        return kExitCertificationFailure;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

namespace {

struct SweepPoint {
    std::vector<double> factors;
};

std::vector<SweepPoint> parse_points(const std::string& text) {
    std::vector<SweepPoint> pts;
    std::stringstream ss(text);
    std::string chunk;
    while (std::getline(ss, chunk, ';')) {
        if (chunk.empty()) continue;
        SweepPoint p;
        std::stringstream cs(chunk);
        std::string cell;
        while (std::getline(cs, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0' || !(v > 0.0)) {
                throw ConfigError("bad sweep factor: '" + cell + "'");
            }
            p.factors.push_back(v);
        }
        if (p.factors.empty()) throw ConfigError("empty sweep point");
        pts.push_back(std::move(p));
    }
    if (pts.empty()) throw ConfigError("no sweep points given");
    return pts;
}

struct SweepRow {
    std::vector<double> factors;
    double sharing_error = 0.0;
    double freq_dev_hz = 0.0;
    double volt_dev_v = 0.0;
    double q_spread_v = 0.0;
    std::string status = "ok";
};

SweepRow run_point(Scenario sc, const std::string& parameter, const SweepPoint& pt) {
    const int n = sc.topology.n_ibr;
    SweepRow row;
    row.factors = pt.factors;

    if (parameter == "mp_ratio" || parameter == "nq_ratio") {
        if (static_cast<int>(pt.factors.size()) != n) {
            throw ConfigError("sweep point needs one factor per IBR (" + std::to_string(n) + ")");
        }
        for (int i = 0; i < n; ++i) {
            if (parameter == "mp_ratio") sc.droop[i].m_p *= pt.factors[i];
            else sc.droop[i].n_q *= pt.factors[i];
        }
    } else if (parameter == "line_scale") {
        if (pt.factors.size() != 1) throw ConfigError("line_scale takes one factor per point");
        for (auto& l : sc.lines) {
            l.r_t *= pt.factors[0];
            l.l_t *= pt.factors[0];
        }
    } else {
        throw ConfigError("unknown sweep parameter: " + parameter +
                          " (expected mp_ratio, nq_ratio, or line_scale)");
    }

    try {
        const TimeSeriesLog log = run(sc);
        const double t1 = sc.duration;
        const WindowSummary s = summarize(sc, log, 0.75 * t1, t1);
        row.sharing_error = s.sharing_error;
        const double f_nom = sc.omega_g / (2.0 * M_PI);
        double q_lo = s.mean_q[0] * sc.droop[0].n_q, q_hi = q_lo;
        for (int i = 0; i < n; ++i) {
            row.freq_dev_hz = std::max(row.freq_dev_hz, std::abs(s.mean_f[i] - f_nom));
            row.volt_dev_v =
                std::max(row.volt_dev_v, std::abs(s.mean_v_amp[i] - sc.v_nom_peak()));
            const double nq_q = s.mean_q[i] * sc.droop[i].n_q;
            q_lo = std::min(q_lo, nq_q);
            q_hi = std::max(q_hi, nq_q);
        }
        row.q_spread_v = q_hi - q_lo;
    } catch (const SimulationDiverged& e) {
        row.status = "diverged_at_" + format_csv_value(e.time());
    }
    return row;
}

}  // namespace

int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        ParsedConfig cfg = parse_config(opt.config_path);
        for (const auto& nline : cfg.notices) err << "notice: " << nline << "\n";
        Scenario base = cfg.scenario;
        base.duration = opt.duration.value_or(1.5);

        const std::vector<SweepPoint> points = parse_points(opt.points);
        for (const auto& pt : points) {
            if (pt.factors.size() != points[0].factors.size()) {
                throw ConfigError("sweep points must all have the same factor count");
            }
        }

        std::vector<std::future<SweepRow>> futures;
        futures.reserve(points.size());
        for (const auto& pt : points) {
            futures.push_back(std::async(std::launch::async, run_point, base, opt.parameter, pt));
        }

        std::ostringstream csv;
        csv << "# mgsim-sweep v1\n";
        csv << "point";
        const std::size_t nf = points[0].factors.size();
        for (std::size_t j = 0; j < nf; ++j) csv << ",factor" << (j + 1);
        csv << ",sharing_error_rel,freq_dev_Hz,volt_dev_V,q_spread_V,status\n";
        for (std::size_t p = 0; p < futures.size(); ++p) {
            const SweepRow row = futures[p].get();
            csv << (p + 1);
            for (double f : row.factors) csv << ',' << format_csv_value(f);
            csv << ',' << format_csv_value(row.sharing_error) << ','
                << format_csv_value(row.freq_dev_hz) << ',' << format_csv_value(row.volt_dev_v)
                << ',' << format_csv_value(row.q_spread_v) << ',' << row.status << "\n";
        }

        const std::string text = csv.str();
        if (!opt.out_path.empty()) {
            std::ofstream f(opt.out_path, std::ios::binary);
            if (!f) throw ConfigError("cannot open for writing: " + opt.out_path);
            f.write(text.data(), static_cast<std::streamsize>(text.size()));
        } else {
            out << text;
        }
        print_kv(out, "points", static_cast<double>(points.size()));
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

}  // namespace mgsim

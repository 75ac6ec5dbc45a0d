#include "mgsim/plant.hpp"

#include <Eigen/LU>
#include <cmath>

#include "mgsim/frames.hpp"

namespace mgsim {

void IbrParams::validate() const {
    if (!(r > 0.0) || !(l > 0.0) || !(c > 0.0) || !(v_dc > 0.0)) {
        throw ConfigError("IBR parameters must be strictly positive (r, l, c, v_dc)");
    }
}

void LineParams::validate() const {
    if (!(r_t > 0.0) || !(l_t > 0.0)) {
        throw ConfigError("line parameters must be strictly positive (r_t, l_t)");
    }
}

void Topology::validate() const {
    if (n_ibr < 1) throw ConfigError("topology needs at least one IBR");
    for (const auto& [i, k] : edges) {
        if (i < 1 || i > n_ibr || k < 1 || k > n_ibr) {
            throw ConfigError("edge endpoint out of range: (" + std::to_string(i) + "," +
                              std::to_string(k) + ") with n = " + std::to_string(n_ibr));
        }
        if (i == k) throw ConfigError("edge endpoints must differ");
    }
    if (!edges.empty()) {
        // connectivity by union-find over the edge list
        std::vector<int> parent(n_ibr);
        for (int i = 0; i < n_ibr; ++i) parent[i] = i;
        auto find = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        for (const auto& [i, k] : edges) parent[find(i - 1)] = find(k - 1);
        for (int i = 1; i < n_ibr; ++i) {
            if (find(i) != find(0)) throw ConfigError("topology graph is not connected");
        }
    }
}

Eigen::MatrixXd incidence_matrix(const Topology& topo) {
    topo.validate();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(topo.n_ibr, topo.n_lines());
    for (int k = 0; k < topo.n_lines(); ++k) {
        b(topo.edges[k].first - 1, k) = 1.0;
        b(topo.edges[k].second - 1, k) = -1.0;
    }
    return b;
}

MicrogridModel assemble(const std::vector<IbrParams>& ibrs,
                        const std::vector<LineParams>& lines,
                        const Topology& topo,
                        double omega_g) {
    if (!(omega_g > 0.0)) throw ConfigError("omega_g must be positive");
    if (static_cast<int>(ibrs.size()) != topo.n_ibr) {
        throw ConfigError("IBR parameter count does not match topology");
    }
    if (static_cast<int>(lines.size()) != topo.n_lines()) {
        throw ConfigError("line parameter count does not match topology");
    }
    for (const auto& p : ibrs) p.validate();
    for (const auto& p : lines) p.validate();

    MicrogridModel model;
    model.layout = StateLayout{topo.n_ibr, topo.n_lines()};
    model.omega_g = omega_g;
    model.ibrs = ibrs;
    model.lines = lines;
    model.incidence = incidence_matrix(topo);

    const int n = model.layout.n;
    const int m = model.layout.m;
    const int dim = model.layout.dim();
    const auto& lay = model.layout;

    model.A = Eigen::MatrixXd::Zero(dim, dim);
    model.B = Eigen::MatrixXd::Zero(dim, 2 * n);
    model.E = Eigen::MatrixXd::Zero(dim, 2 * n);

    // Capacitor rows: C_i dv/dt = -omega (J (x) C) v + i + B_ik i_t - i_L.
    // Each row is pre-multiplied by 1/C_i; the J (x) I coupling swaps the
    // stacked d/q groups with signs (+q row into d, -d row into q).
    for (int i = 0; i < n; ++i) {
        const double ci = ibrs[i].c;
        model.A(lay.vd(i), lay.vq(i)) -= omega_g;
        model.A(lay.vq(i), lay.vd(i)) += omega_g;
        model.A(lay.vd(i), lay.id(i)) += 1.0 / ci;
        model.A(lay.vq(i), lay.iq(i)) += 1.0 / ci;
        for (int k = 0; k < m; ++k) {
            const double bik = model.incidence(i, k);
            if (bik == 0.0) continue;
            model.A(lay.vd(i), lay.itd(k)) += bik / ci;
            model.A(lay.vq(i), lay.itq(k)) += bik / ci;
        }
        model.E(lay.vd(i), i) = -1.0 / ci;
        model.E(lay.vq(i), n + i) = -1.0 / ci;
    }

    // Filter rows: L_i di/dt = -v - (omega (J (x) L) + R) i + u.
    for (int i = 0; i < n; ++i) {
        const double li = ibrs[i].l;
        model.A(lay.id(i), lay.vd(i)) -= 1.0 / li;
        model.A(lay.iq(i), lay.vq(i)) -= 1.0 / li;
        model.A(lay.id(i), lay.iq(i)) -= omega_g;
        model.A(lay.iq(i), lay.id(i)) += omega_g;
        model.A(lay.id(i), lay.id(i)) -= ibrs[i].r / li;
        model.A(lay.iq(i), lay.iq(i)) -= ibrs[i].r / li;
        model.B(lay.id(i), i) = 1.0 / li;
        model.B(lay.iq(i), n + i) = 1.0 / li;
    }

    // Line rows: L_t di_t/dt = -B_ik^T v - (omega (J (x) L_t) + R_t) i_t.
    for (int k = 0; k < m; ++k) {
        const double lt = lines[k].l_t;
        for (int i = 0; i < n; ++i) {
            const double bik = model.incidence(i, k);
            if (bik == 0.0) continue;
            model.A(lay.itd(k), lay.vd(i)) -= bik / lt;
            model.A(lay.itq(k), lay.vq(i)) -= bik / lt;
        }
        model.A(lay.itd(k), lay.itq(k)) -= omega_g;
        model.A(lay.itq(k), lay.itd(k)) += omega_g;
        model.A(lay.itd(k), lay.itd(k)) -= lines[k].r_t / lt;
        model.A(lay.itq(k), lay.itq(k)) -= lines[k].r_t / lt;
    }

    // Output selector y = [v_dq; i_dq].
    model.C = Eigen::MatrixXd::Zero(4 * n, dim);
    model.C.topLeftCorner(4 * n, 4 * n).setIdentity();
    return model;
}

EulerMatrices euler_matrices(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& E, double h) {
    EulerMatrices out;
    out.A_d = Eigen::MatrixXd::Identity(A.rows(), A.cols()) + A * h;
    out.B_d = B * h;
    out.E_d = E * h;
    return out;
}

void discretize(MicrogridModel& model, double tau_s) {
    if (tau_s < 0.0) throw ConfigError("tau_s must be non-negative");
    EulerMatrices d = euler_matrices(model.A, model.B, model.E, tau_s);
    model.A_d = std::move(d.A_d);
    model.B_d = std::move(d.B_d);
    model.E_d = std::move(d.E_d);
    model.tau_s = tau_s;
}

Eigen::Matrix2d load_admittance(const LoadSpec& spec, double v_rated_rms) {
    if (!(v_rated_rms > 0.0)) throw ConfigError("rated voltage must be positive");
    const double s2 = spec.p_rated * spec.p_rated + spec.q_rated * spec.q_rated;
    if (s2 == 0.0) return Eigen::Matrix2d::Zero();
    const double v2 = v_rated_rms * v_rated_rms;
    const double rz = v2 * spec.p_rated / s2;
    const double xz = v2 * spec.q_rated / s2;
    const Eigen::Matrix2d z = rz * Eigen::Matrix2d::Identity() + xz * skew_j();
    return z.inverse();
}

LoadBank::LoadBank(std::vector<LoadSpec> specs, double v_sizing_rms, int n_ibr)
    : specs_(std::move(specs)), n_ibr_(n_ibr) {
    admittances_.reserve(specs_.size());
    for (const auto& s : specs_) {
        if (s.bus < 1 || s.bus > n_ibr_) {
            throw ConfigError("load bus " + std::to_string(s.bus) + " out of range");
        }
        if (s.p_rated < 0.0) throw ConfigError("load active power must be non-negative");
        admittances_.push_back(load_admittance(s, v_sizing_rms));
    }
}

Eigen::VectorXd LoadBank::currents(const Eigen::VectorXd& x, const StateLayout& layout,
                                   double t) const {
    Eigen::VectorXd il = Eigen::VectorXd::Zero(2 * layout.n);
    for (std::size_t j = 0; j < specs_.size(); ++j) {
        if (!specs_[j].active_at(t)) continue;
        const int b = specs_[j].bus - 1;
        const Eigen::Vector2d v{x[layout.vd(b)], x[layout.vq(b)]};
        const Eigen::Vector2d i = admittances_[j] * v;
        il[b] += i.x();
        il[layout.n + b] += i.y();
    }
    return il;
}

Eigen::Matrix2d LoadBank::bus_admittance(int bus, double t) const {
    Eigen::Matrix2d y = Eigen::Matrix2d::Zero();
    for (std::size_t j = 0; j < specs_.size(); ++j) {
        if (specs_[j].bus == bus && specs_[j].active_at(t)) y += admittances_[j];
    }
    return y;
}

PlantStepper::PlantStepper(const MicrogridModel& model, int substeps)
    : model_(&model), substeps_(substeps) {
    if (substeps < 1) throw ConfigError("substeps must be >= 1");
    if (!(model.tau_s > 0.0)) throw ConfigError("model is not discretized (tau_s == 0)");
    h_ = model.tau_s / substeps;
    sub_ = euler_matrices(model.A, model.B, model.E, h_);
}

double stored_energy(const MicrogridModel& model, const Eigen::VectorXd& x) {
    const auto& lay = model.layout;
    double e = 0.0;
    for (int i = 0; i < lay.n; ++i) {
        const double v2 = x[lay.vd(i)] * x[lay.vd(i)] + x[lay.vq(i)] * x[lay.vq(i)];
        const double i2 = x[lay.id(i)] * x[lay.id(i)] + x[lay.iq(i)] * x[lay.iq(i)];
        e += 0.75 * (model.ibrs[i].c * v2 + model.ibrs[i].l * i2);
    }
    for (int k = 0; k < lay.m; ++k) {
        const double it2 = x[lay.itd(k)] * x[lay.itd(k)] + x[lay.itq(k)] * x[lay.itq(k)];
        e += 0.75 * model.lines[k].l_t * it2;
    }
    return e;
}

Eigen::VectorXd PlantStepper::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                   const LoadBank& loads, double t, StepFlux* flux) const {
    const auto& lay = model_->layout;
    Eigen::VectorXd xs = x;
    for (int s = 0; s < substeps_; ++s) {
        const Eigen::VectorXd il = loads.currents(xs, lay, t + s * h_);
        if (flux != nullptr) {
            double p_inv = 0.0, p_load = 0.0, p_loss = 0.0;
            for (int i = 0; i < lay.n; ++i) {
                p_inv += u[i] * xs[lay.id(i)] + u[lay.n + i] * xs[lay.iq(i)];
                p_load += xs[lay.vd(i)] * il[i] + xs[lay.vq(i)] * il[lay.n + i];
                p_loss += model_->ibrs[i].r * (xs[lay.id(i)] * xs[lay.id(i)] +
                                               xs[lay.iq(i)] * xs[lay.iq(i)]);
            }
            for (int k = 0; k < lay.m; ++k) {
                p_loss += model_->lines[k].r_t * (xs[lay.itd(k)] * xs[lay.itd(k)] +
                                                  xs[lay.itq(k)] * xs[lay.itq(k)]);
            }
            flux->e_inverter += h_ * 1.5 * p_inv;
            flux->e_load += h_ * 1.5 * p_load;
            flux->e_loss += h_ * 1.5 * p_loss;
        }
        xs = sub_.A_d * xs + sub_.B_d * u + sub_.E_d * il;
    }
    if (!xs.allFinite()) throw SimulationDiverged(t, xs);
    return xs;
}

Eigen::VectorXd step_plant(const MicrogridModel& model, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& u, const LoadBank& loads, double t,
                           int substeps) {
    return PlantStepper(model, substeps).step(x, u, loads, t);
}

}  // namespace mgsim

#include "mgsim/droop.hpp"

#include "mgsim/errors.hpp"

namespace mgsim {

PQ instantaneous_power(const Dq& v, const Dq& i) {
    PQ out;
    out.p = 1.5 * (v.d * i.d + v.q * i.q);
    out.q = 1.5 * (v.d * i.q - v.q * i.d);
    return out;
}

void lowpass_step(PowerFilter& f, double p_raw, double q_raw, double tau_s) {
    const double a = tau_s * f.omega_c;
    f.p_filt += a * (p_raw - f.p_filt);
    f.q_filt += a * (q_raw - f.q_filt);
}

std::pair<double, double> droop_law(double p_filt, double q_filt, const DroopParams& params) {
    return {params.omega_g - params.m_p * p_filt, params.v_nom - params.n_q * q_filt};
}

double integrate_angle(double delta_i, double omega_i, double omega_g, double tau_s) {
    return wrap_angle(delta_i + (omega_i - omega_g) * tau_s);
}

std::vector<double> expected_sharing(const std::vector<double>& m_p, double p_total) {
    if (m_p.empty()) throw ConfigError("expected_sharing needs at least one coefficient");
    if (p_total < 0.0) throw ConfigError("total power must be non-negative");
    double inv_sum = 0.0;
    for (double mp : m_p) {
        if (!(mp > 0.0)) throw ConfigError("droop coefficients must be positive");
        inv_sum += 1.0 / mp;
    }
    std::vector<double> out(m_p.size());
    for (std::size_t i = 0; i < m_p.size(); ++i) out[i] = p_total * (1.0 / m_p[i]) / inv_sum;
    return out;
}

}  // namespace mgsim

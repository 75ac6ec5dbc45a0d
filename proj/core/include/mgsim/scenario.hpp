#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mgsim/droop.hpp"
#include "mgsim/inner_control.hpp"
#include "mgsim/plant.hpp"

namespace mgsim {

/// Everything one closed-loop run needs. Voltages are stored as the config
/// provides them (rms line-to-neutral); peak and load-sizing values are
/// derived once through the accessors below.
struct Scenario {
    double v_rated_rms = 220.0;
    double omega_g = 2.0 * M_PI * 50.0;

    std::vector<IbrParams> ibrs;
    std::vector<DroopParams> droop;  // one per IBR
    std::vector<LineParams> lines;
    Topology topology;
    std::vector<LoadSpec> loads;

    PiGains pi{0.15, 30.0, 30.0};
    double power_filter_cutoff = 2.0 * M_PI * 100.0;  // rad/s
    CostWeights weights{};

    double tau_s = 1e-4;
    int substeps = 10;
    double duration = 4.0;
    int log_decimation = 10;

    /// Peak phase amplitude of the rated voltage (311 V for 220 V rms).
    double v_nom_peak() const { return std::sqrt(2.0) * v_rated_rms; }

    /// Load admittances are sized at sqrt(3) * (line-to-neutral rms) so a
    /// load draws its rated three-phase power at nominal bus voltage under
    /// the amplitude-invariant dq power convention P = 1.5 v^T i.
    double load_sizing_rms() const { return std::sqrt(3.0) * v_rated_rms; }

    void validate() const;
    /// Non-fatal issues (e.g. lines that are not inductance-dominant).
    std::vector<std::string> warnings() const;

    /// The shipped three-IBR reference scenario: homogeneous 600 V DC IBRs,
    /// two 0.2 ohm / 0.3 mH lines in a chain, base loads at all three buses
    /// and a 2 kVA load step on bus 3 over t in [1 s, 3 s).
    static Scenario table1();
};

}  // namespace mgsim

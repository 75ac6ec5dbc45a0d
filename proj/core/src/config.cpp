#include "mgsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

#include "mgsim/errors.hpp"

namespace mgsim {

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

struct Ini {
    // section name -> (key -> entry); section order is irrelevant here
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::map<std::string, int> section_lines;
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

Ini parse_ini(const std::string& text) {
    Ini ini;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("malformed section header (line " + std::to_string(line_no) + ")");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("empty section name (line " + std::to_string(line_no) + ")");
            }
            ini.sections[section];
            ini.section_lines.emplace(section, line_no);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value' (line " + std::to_string(line_no) + ")");
        }
        if (section.empty()) {
            throw ConfigError("key outside of any section (line " + std::to_string(line_no) + ")");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("empty key or value (line " + std::to_string(line_no) + ")");
        }
        ini.sections[section][key] = Entry{value, line_no};
    }
    return ini;
}

double to_double(const std::string& section, const std::string& key, const Entry& e) {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0') {
        throw ConfigError("[" + section + "]." + key + ": not a number: '" + e.value +
                          "' (line " + std::to_string(e.line) + ")");
    }
    return v;
}

// Consume-as-you-go accessors; whatever is left at the end is unknown.
class SectionReader {
  public:
    SectionReader(Ini& ini, std::string name, std::vector<std::string>* notices)
        : ini_(ini), name_(std::move(name)), notices_(notices) {}

    bool present() const { return ini_.sections.count(name_) > 0; }

    double number(const std::string& key, double fallback) {
        auto* e = take(key);
        if (e == nullptr) {
            note(key, fallback);
            return fallback;
        }
        return to_double(name_, key, *e);
    }

    long integer(const std::string& key, long fallback) {
        auto* e = take(key);
        if (e == nullptr) {
            note(key, static_cast<double>(fallback));
            return fallback;
        }
        const double v = to_double(name_, key, *e);
        const long l = std::lround(v);
        if (static_cast<double>(l) != v) {
            throw ConfigError("[" + name_ + "]." + key + ": expected an integer (line " +
                              std::to_string(e->line) + ")");
        }
        return l;
    }

    /// Like number() but silent when absent (optional per-IBR overrides).
    bool try_number(const std::string& key, double* out) {
        auto* e = take(key);
        if (e == nullptr) return false;
        *out = to_double(name_, key, *e);
        return true;
    }

  private:
    Entry* take(const std::string& key) {
        auto sec = ini_.sections.find(name_);
        if (sec == ini_.sections.end()) return nullptr;
        auto it = sec->second.find(key);
        if (it == sec->second.end()) return nullptr;
        auto* entry = &scratch_.emplace_back(it->second);
        sec->second.erase(it);
        return entry;
    }

    void note(const std::string& key, double fallback) {
        if (notices_ != nullptr) {
            std::ostringstream ss;
            ss << "defaulted [" << name_ << "]." << key << " = " << fallback;
            notices_->push_back(ss.str());
        }
    }

    Ini& ini_;
    std::string name_;
    std::vector<std::string>* notices_;
    std::deque<Entry> scratch_;
};

std::vector<int> indexed_sections(const Ini& ini, const std::string& prefix) {
    std::vector<int> idx;
    for (const auto& [name, _] : ini.sections) {
        if (name.rfind(prefix, 0) != 0) continue;
        const std::string tail = name.substr(prefix.size());
        char* end = nullptr;
        const long v = std::strtol(tail.c_str(), &end, 10);
        if (end == tail.c_str() || *end != '\0' || v < 1) {
            throw ConfigError("bad section name [" + name + "] (line " +
                              std::to_string(ini.section_lines.at(name)) + ")");
        }
        idx.push_back(static_cast<int>(v));
    }
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] != static_cast<int>(i) + 1) {
            throw ConfigError("[" + prefix + "N] sections must be contiguous from 1");
        }
    }
    return idx;
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text) {
    Ini ini = parse_ini(text);
    ParsedConfig out;
    const Scenario base = Scenario::table1();
    Scenario& sc = out.scenario;

    {
        SectionReader grid(ini, "grid", &out.notices);
        sc.v_rated_rms = grid.number("v_rated_rms", base.v_rated_rms);
        const double f_hz = grid.number("f_hz", base.omega_g / (2.0 * M_PI));
        if (!(f_hz > 0.0)) throw ConfigError("[grid].f_hz must be positive");
        sc.omega_g = 2.0 * M_PI * f_hz;
    }

    const std::vector<int> ibr_idx = indexed_sections(ini, "ibr.");
    const std::vector<int> line_idx = indexed_sections(ini, "line.");
    const std::vector<int> load_idx = indexed_sections(ini, "load.");
    const bool explicit_grid = !ibr_idx.empty();

    const IbrParams base_ibr = base.ibrs[0];
    if (explicit_grid) {
        for (int i : ibr_idx) {
            SectionReader sec(ini, "ibr." + std::to_string(i), &out.notices);
            IbrParams p;
            p.r = sec.number("r", base_ibr.r);
            p.l = sec.number("l", base_ibr.l);
            p.c = sec.number("c", base_ibr.c);
            p.v_dc = sec.number("v_dc", base_ibr.v_dc);
            sc.ibrs.push_back(p);
        }
    } else {
        sc.ibrs = base.ibrs;
        out.notices.push_back("no [ibr.N] sections; using the built-in 3-IBR scenario");
    }
    const int n = static_cast<int>(sc.ibrs.size());
    sc.topology.n_ibr = n;

    const LineParams base_line = base.lines[0];
    if (!line_idx.empty()) {
        for (int k : line_idx) {
            SectionReader sec(ini, "line." + std::to_string(k), &out.notices);
            const long from = sec.integer("from", 0);
            const long to = sec.integer("to", 0);
            if (from < 1 || to < 1) {
                throw ConfigError("[line." + std::to_string(k) + "] needs 'from' and 'to'");
            }
            LineParams p;
            p.r_t = sec.number("r_t", base_line.r_t);
            p.l_t = sec.number("l_t", base_line.l_t);
            sc.lines.push_back(p);
            sc.topology.edges.emplace_back(static_cast<int>(from), static_cast<int>(to));
        }
    } else if (!explicit_grid) {
        sc.lines = base.lines;
        sc.topology.edges = base.topology.edges;
    }

    if (!load_idx.empty()) {
        for (int j : load_idx) {
            SectionReader sec(ini, "load." + std::to_string(j), &out.notices);
            LoadSpec l;
            l.bus = static_cast<int>(sec.integer("bus", 0));
            if (l.bus < 1) throw ConfigError("[load." + std::to_string(j) + "] needs 'bus'");
            l.p_rated = sec.number("p_w", 0.0);
            l.q_rated = sec.number("q_var", 0.0);
            double t_on = 0.0, t_off = 0.0;
            if (sec.try_number("t_on", &t_on)) l.t_on = t_on;
            if (sec.try_number("t_off", &t_off)) l.t_off = t_off;
            sc.loads.push_back(l);
        }
    } else if (!explicit_grid) {
        sc.loads = base.loads;
    }

    {
        SectionReader droop(ini, "droop", &out.notices);
        const double m_p = droop.number("m_p", base.droop[0].m_p);
        const double n_q = droop.number("n_q", base.droop[0].n_q);
        const double cutoff_hz =
            droop.number("filter_cutoff_hz", base.power_filter_cutoff / (2.0 * M_PI));
        sc.power_filter_cutoff = 2.0 * M_PI * cutoff_hz;
        sc.droop.assign(n, DroopParams{m_p, n_q, sc.v_nom_peak(), sc.omega_g});
        for (int i = 1; i <= n; ++i) {
            double v = 0.0;
            if (droop.try_number("m_p_" + std::to_string(i), &v)) sc.droop[i - 1].m_p = v;
            if (droop.try_number("n_q_" + std::to_string(i), &v)) sc.droop[i - 1].n_q = v;
        }
    }

    {
        SectionReader pi(ini, "pi", &out.notices);
        sc.pi.k_p = pi.number("k_p", base.pi.k_p);
        sc.pi.k_i = pi.number("k_i", base.pi.k_i);
        sc.pi.limit = pi.number("limit", base.pi.limit);
    }

    {
        SectionReader sim(ini, "sim", &out.notices);
        sc.tau_s = sim.number("tau_s", base.tau_s);
        sc.duration = sim.number("duration", base.duration);
        sc.substeps = static_cast<int>(sim.integer("substeps", base.substeps));
        const double log_rate = sim.number("log_rate_hz", 1000.0);
        if (!(log_rate > 0.0)) throw ConfigError("[sim].log_rate_hz must be positive");
        sc.log_decimation = static_cast<int>(std::max(1L, std::lround(1.0 / (sc.tau_s * log_rate))));
        sc.weights.w_i = sim.number("w_i", 1.0);
        sc.weights.w_v = sim.number("w_v", 0.0);
    }

    {
        SectionReader st(ini, "stability", &out.notices);
        if (st.present()) {
            StabilityConfig& c = out.stability;
            c.grid_points = static_cast<int>(st.integer("grid_points", c.grid_points));
            c.steps = st.integer("steps", c.steps);
            c.x0_1 = st.number("x0_1", c.x0_1);
            c.x0_2 = st.number("x0_2", c.x0_2);
            c.k_1 = st.number("k_1", c.k_1);
            c.k_2 = st.number("k_2", c.k_2);
            c.exact_law = st.integer("exact_law", 0) != 0;
        }
    }

    // whatever keys remain were never consumed
    for (const auto& [name, keys] : ini.sections) {
        static const char* known[] = {"grid", "droop", "pi", "sim", "stability"};
        const bool known_flat =
            std::any_of(std::begin(known), std::end(known),
                        [&](const char* k) { return name == k; });
        const bool known_indexed = name.rfind("ibr.", 0) == 0 || name.rfind("line.", 0) == 0 ||
                                   name.rfind("load.", 0) == 0;
        if (!known_flat && !known_indexed) {
            throw ConfigError("unknown section [" + name + "] (line " +
                              std::to_string(ini.section_lines.at(name)) + ")");
        }
        if (!keys.empty()) {
            const auto& [key, entry] = *keys.begin();
            throw ConfigError("unknown key '" + key + "' in [" + name + "] (line " +
                              std::to_string(entry.line) + ")");
        }
    }

    out.scenario.validate();
    return out;
}

ParsedConfig parse_config(const std::string& path) {
    if (path.empty()) return parse_config_text("");
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace mgsim

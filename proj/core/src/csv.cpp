#include "mgsim/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mgsim/errors.hpp"

namespace mgsim {

std::string format_csv_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string csv_to_string(const TimeSeriesLog& log) {
    std::string out;
    out.reserve(64 + log.data.size() * 12);
    out += "# ";
    out += kCsvSchemaVersion;
    out += '\n';
    for (std::size_t c = 0; c < log.cols(); ++c) {
        if (c > 0) out += ',';
        out += log.columns[c];
    }
    out += '\n';
    const std::size_t nc = log.cols();
    for (std::size_t r = 0; r < log.rows(); ++r) {
        for (std::size_t c = 0; c < nc; ++c) {
            if (c > 0) out += ',';
            out += format_csv_value(log.data[r * nc + c]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const TimeSeriesLog& log, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    const std::string s = csv_to_string(log);
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw ConfigError("write failed: " + path);
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (t.schema_version.empty()) {
                std::size_t s = 1;
                while (s < line.size() && line[s] == ' ') ++s;
                t.schema_version = line.substr(s);
            }
            continue;
        }
        std::stringstream row(line);
        std::string cell;
        if (!have_header) {
            while (std::getline(row, cell, ',')) t.columns.push_back(cell);
            if (t.columns.empty()) throw ConfigError("CSV header row is empty");
            have_header = true;
            continue;
        }
        std::size_t count = 0;
        while (std::getline(row, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw ConfigError("CSV cell is not a number: '" + cell + "'");
            }
            t.data.push_back(v);
            ++count;
        }
        if (count != t.columns.size()) {
            throw ConfigError("CSV row arity mismatch: got " + std::to_string(count) +
                              ", header has " + std::to_string(t.columns.size()));
        }
    }
    if (!have_header) throw ConfigError("CSV has no header row");
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace mgsim

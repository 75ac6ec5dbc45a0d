#pragma once

#include <string>
#include <vector>

#include "mgsim/engine.hpp"

namespace mgsim {

/// Schema identifier written as the first comment line of every run CSV.
inline constexpr const char* kCsvSchemaVersion = "mgsim-csv v1";

/// Serialize the log: one comment line with the schema version, a header row
/// naming every column, then one row per sample with 9-significant-digit
/// decimal serialization. Byte-stable for identical logs.
std::string csv_to_string(const TimeSeriesLog& log);

void write_csv(const TimeSeriesLog& log, const std::string& path);

/// Columns + rows parsed back from CSV text (values via strtod, which is
/// exact for the 9-digit serialization round trip).
struct CsvTable {
    std::string schema_version;
    std::vector<std::string> columns;
    std::vector<double> data;  // row-major

    std::size_t cols() const { return columns.size(); }
    std::size_t rows() const { return columns.empty() ? 0 : data.size() / columns.size(); }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

/// One value in the run-CSV number format (printf %.9g).
std::string format_csv_value(double v);

}  // namespace mgsim

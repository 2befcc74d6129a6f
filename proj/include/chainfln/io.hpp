// io.hpp — Scaling-record CSV (17 significant digits, locale independent).

#pragma once

#include "chainfln/analysis.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace chainfln {

inline constexpr const char* kScalingCsvHeader = "l,chord,fln,mutual_info,s_a,s_b,s_full,flags";

class CsvFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 17 significant digits with '.' separator; nan and inf spelled out.
std::string format_double(double v);

void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows);
void write_scaling_csv(const std::filesystem::path& path, const std::vector<ScalingRow>& rows);

// Columns are located by name; extra columns are ignored. Throws CsvFormatError
// on missing columns or unparsable fields.
std::vector<ScalingRow> read_scaling_csv(std::istream& is);
std::vector<ScalingRow> read_scaling_csv(const std::filesystem::path& path);

} // namespace chainfln

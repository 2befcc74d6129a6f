#include "chainfln/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace chainfln {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, std::size_t line, const char* column) {
    if (s == "nan" || s == "NaN") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw CsvFormatError("line " + std::to_string(line) + ": column '" + column + "' is not a number: '" + s +
                             "'");
    }
    return v;
}

int parse_int(const std::string& s, std::size_t line, const char* column) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw CsvFormatError("line " + std::to_string(line) + ": column '" + column + "' is not an integer: '" + s +
                             "'");
    }
    return v;
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
    os << kScalingCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.l << ',' << format_double(r.chord) << ',' << format_double(r.fln) << ','
           << format_double(r.mutual_info) << ',' << format_double(r.s_a) << ',' << format_double(r.s_b) << ','
           << format_double(r.s_full) << ',' << r.flags << '\n';
    }
}

void write_scaling_csv(const std::filesystem::path& path, const std::vector<ScalingRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_scaling_csv(os, rows);
    if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<ScalingRow> read_scaling_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw CsvFormatError("empty CSV (missing header)");
    const std::vector<std::string> header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

    constexpr std::array<const char*, 8> required{"l", "chord", "fln", "mutual_info", "s_a", "s_b", "s_full", "flags"};
    std::string missing;
    for (const char* name : required) {
        if (!col.count(name)) missing += (missing.empty() ? "" : ", ") + std::string(name);
    }
    if (!missing.empty()) throw CsvFormatError("CSV header lacks column(s): " + missing);

    std::vector<ScalingRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split(line);
        if (f.size() < header.size()) {
            throw CsvFormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                                 " fields");
        }
        ScalingRow r;
        r.l = parse_int(f[col["l"]], lineno, "l");
        r.chord = parse_double(f[col["chord"]], lineno, "chord");
        r.fln = parse_double(f[col["fln"]], lineno, "fln");
        r.mutual_info = parse_double(f[col["mutual_info"]], lineno, "mutual_info");
        r.s_a = parse_double(f[col["s_a"]], lineno, "s_a");
        r.s_b = parse_double(f[col["s_b"]], lineno, "s_b");
        r.s_full = parse_double(f[col["s_full"]], lineno, "s_full");
        r.flags = parse_int(f[col["flags"]], lineno, "flags");
        rows.push_back(r);
    }
    return rows;
}

std::vector<ScalingRow> read_scaling_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    return read_scaling_csv(is);
}

} // namespace chainfln

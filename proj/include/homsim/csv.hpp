#ifndef HOMSIM_CSV_HPP
#define HOMSIM_CSV_HPP

/*
 * Scan CSV schema:
 *
 *   # key = value            (resolved config echo, one line per key)
 *   delta_l_mm,tau_ps,p_model,expected_signal,expected_accidentals,counts
 *   <rows...>
 *
 * Floats carry 9 significant digits; sampled counts are bare integers
 * (theory-mode expectations stay floats). Lines end with LF. Serialization
 * is byte-deterministic for identical inputs.
 */

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "homsim/errors.hpp"

namespace homsim {

inline constexpr const char* kScanCsvHeader =
    "delta_l_mm,tau_ps,p_model,expected_signal,expected_accidentals,counts";

struct ScanRow {
    double delta_l_mm = 0.0;
    double tau_ps = 0.0;
    double p_model = 0.0;
    double expected_signal = 0.0;
    double expected_accidentals = 0.0;
    double counts = 0.0;
    bool counts_integral = true;  // serialize counts as a bare integer
};

struct ScanCsv {
    std::vector<std::pair<std::string, std::string>> config_echo;
    std::vector<ScanRow> rows;
};

inline std::string format_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string serialize_row(const ScanRow& r) {
    std::string line;
    line += format_sig9(r.delta_l_mm);
    line += ',';
    line += format_sig9(r.tau_ps);
    line += ',';
    line += format_sig9(r.p_model);
    line += ',';
    line += format_sig9(r.expected_signal);
    line += ',';
    line += format_sig9(r.expected_accidentals);
    line += ',';
    if (r.counts_integral) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%llu",
                      static_cast<unsigned long long>(r.counts));
        line += buf;
    } else {
        line += format_sig9(r.counts);
    }
    return line;
}

inline std::string serialize_scan_csv(const ScanCsv& csv) {
    std::string out;
    for (const auto& [key, value] : csv.config_echo)
        out += "# " + key + " = " + value + "\n";
    out += kScanCsvHeader;
    out += '\n';
    for (const ScanRow& r : csv.rows) {
        out += serialize_row(r);
        out += '\n';
    }
    return out;
}

namespace detail {

inline double parse_csv_field(const std::string& field, std::size_t line_no,
                              const char* name) {
    if (field.empty()) throw csv_error(std::string("empty ") + name, line_no);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw csv_error(std::string("cannot parse ") + name + " from '" + field +
                            "'",
                        line_no);
    }
    if (pos != field.size())
        throw csv_error(std::string("trailing characters in ") + name + " '" +
                            field + "'",
                        line_no);
    return v;
}

}  // namespace detail

// Parses scan CSV text; `# key = value` comment lines are returned as the
// config echo. Schema violations raise csv_error with the line number.
inline ScanCsv parse_scan_csv(const std::string& text) {
    ScanCsv out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos <= text.size() && pos != std::string::npos && pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = eol == std::string::npos
                               ? text.substr(pos)
                               : text.substr(pos, eol - pos);
        pos = eol == std::string::npos ? text.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::size_t eq = line.find('=');
            if (eq != std::string::npos) {
                auto trim = [](std::string s) {
                    const std::size_t b = s.find_first_not_of(" \t#");
                    const std::size_t e = s.find_last_not_of(" \t");
                    return b == std::string::npos ? std::string()
                                                  : s.substr(b, e - b + 1);
                };
                out.config_echo.emplace_back(trim(line.substr(0, eq)),
                                             trim(line.substr(eq + 1)));
            }
            continue;
        }
        if (!header_seen) {
            if (line != kScanCsvHeader)
                throw csv_error("expected header '" +
                                    std::string(kScanCsvHeader) + "', got '" +
                                    line + "'",
                                line_no);
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(
                start, comma == std::string::npos ? std::string::npos
                                                  : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 6)
            throw csv_error("expected 6 fields, got " +
                                std::to_string(fields.size()),
                            line_no);
        ScanRow r;
        r.delta_l_mm = detail::parse_csv_field(fields[0], line_no, "delta_l_mm");
        r.tau_ps = detail::parse_csv_field(fields[1], line_no, "tau_ps");
        r.p_model = detail::parse_csv_field(fields[2], line_no, "p_model");
        r.expected_signal =
            detail::parse_csv_field(fields[3], line_no, "expected_signal");
        r.expected_accidentals =
            detail::parse_csv_field(fields[4], line_no, "expected_accidentals");
        r.counts = detail::parse_csv_field(fields[5], line_no, "counts");
        r.counts_integral =
            fields[5].find_first_of(".eE") == std::string::npos;
        out.rows.push_back(r);
    }
    if (!header_seen) throw csv_error("missing header line", line_no);
    return out;
}

}  // namespace homsim

#endif  // HOMSIM_CSV_HPP

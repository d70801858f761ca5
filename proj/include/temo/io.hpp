#pragma once

// Structured output: CSV files with embedded run metadata (version, seed,
// effective config) and JSON summaries. Numbers are printed with %.17g so
// identical doubles always produce identical bytes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "temo/version.hpp"

namespace temo::io {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt(std::size_t v) { return std::to_string(v); }

/// Effective configuration echoed into every output file, keyed and ordered.
using ConfigEcho = std::map<std::string, std::string>;

inline std::string config_line(const ConfigEcho& cfg) {
    std::string line;
    for (const auto& [k, v] : cfg) {
        if (!line.empty()) line += " ";
        line += k + "=" + v;
    }
    return line;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const ConfigEcho& cfg,
              const std::vector<std::string>& columns) {
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
        out_ << "# version=" << version << "\n";
        out_ << "# config: " << config_line(cfg) << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Interquartile range with quartiles at the medians of the two halves.
inline double iqr(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    const std::vector<double> lower(v.begin(), v.begin() + n / 2);
    const std::vector<double> upper(v.begin() + (n + 1) / 2, v.end());
    return median(upper) - median(lower);
}

} // namespace temo::io

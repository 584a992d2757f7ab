#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "plq/types.hpp"

namespace plq {

// All numeric output (CSV cells, report values) is printed at 12 significant
// digits with '.' decimal separator, independent of locale.
inline std::string format12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

// Comma-separated, header row, one record per line.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format12(row[i]);
        }
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

}  // namespace plq

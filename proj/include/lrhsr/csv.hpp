// csv.hpp — number formatting and minimal CSV reading for exported tables

#pragma once

#include <cstdio>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace lrhsr {

// Scientific notation with 17 significant digits: exact double round trip.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (std::getline(in, line)) t.header = split_csv_line(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split_csv_line(line));
    return t;
}

} // namespace lrhsr

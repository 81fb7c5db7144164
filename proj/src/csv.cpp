#include "kvbeam/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kvbeam/model.hpp"

namespace kvbeam {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_kv_csv(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "key,value\n";
    for (const auto& [k, v] : pairs) out << k << "," << v << "\n";
    if (!out) throw ConfigError("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open: " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    if (t.header.empty()) throw ConfigError("CSV header missing: " + path);
    t.columns.resize(t.header.size());

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= t.columns.size())
                throw ConfigError(path + ": too many columns on line " +
                                  std::to_string(lineno));
            try {
                std::size_t used = 0;
                double v = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
                t.columns[col].push_back(v);
            } catch (const std::exception&) {
                throw ConfigError(path + ": bad number '" + cell + "' on line " +
                                  std::to_string(lineno));
            }
            ++col;
        }
        if (col != t.columns.size())
            throw ConfigError(path + ": wrong column count on line " + std::to_string(lineno));
    }
    return t;
}

}  // namespace kvbeam

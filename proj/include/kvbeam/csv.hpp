#pragma once

#include <string>
#include <vector>

namespace kvbeam {

/// Write a CSV file with a header row; numbers use %.17g so reruns are
/// byte-identical.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Key/value CSV used for metadata and constants dumps.
void write_kv_csv(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& pairs);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

/// Read a CSV of numeric columns under a mandatory header row.
CsvTable read_csv(const std::string& path);

std::string format_double(double v);

}  // namespace kvbeam

#pragma once

// Column-ordered numeric tables and their deterministic CSV/JSON emission:
// fixed column order and 17 significant digits (lossless double round-trip).

#include <string>
#include <vector>

namespace specdet {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string format_double(double v);  // %.17g
std::string table_to_csv(const Table& t);
std::string table_to_json(const Table& t);

// format: "csv" or "json"; path "-" or empty writes to stdout.
void emit(const Table& t, const std::string& format, const std::string& path);

// Loader used by round-trip tests.
Table parse_csv(const std::string& text);

}  // namespace specdet

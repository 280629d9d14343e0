#include "specdet/table.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "specdet/types.hpp"

namespace specdet {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string table_to_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size())
            throw input_error("table row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string table_to_json(const Table& t) {
    nlohmann::json j;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size())
            throw input_error("table row width mismatch");
        j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
}

void emit(const Table& t, const std::string& format, const std::string& path) {
    std::string payload;
    if (format == "csv")
        payload = table_to_csv(t);
    else if (format == "json")
        payload = table_to_json(t);
    else
        throw input_error("unknown output format: " + format);
    if (path.empty() || path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(path);
    if (!out) throw input_error("cannot write output file: " + path);
    out << payload;
}

Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw input_error("empty CSV");
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) t.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            // strtod (unlike stod) parses subnormals without throwing.
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw input_error("bad CSV number: " + cell);
            vals.push_back(v);
        }
        if (vals.size() != t.columns.size())
            throw input_error("CSV row width mismatch");
        t.rows.push_back(std::move(vals));
    }
    return t;
}

}  // namespace specdet

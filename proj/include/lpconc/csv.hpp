#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace lpconc {

struct CsvTable {
    std::vector<std::string> comments;  // emitted as leading '#' lines
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// Shortest round-trip decimal form of a double ("%.17g" trimmed).
std::string format_double(double v);

// Writes to a temp file in the same directory, then renames into place.
void write_csv(const std::string& path, const CsvTable& table);

void write_json_sidecar(const std::string& path, const nlohmann::json& doc);

}  // namespace lpconc

#include "lpconc/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace lpconc {

namespace {

void atomic_write(const std::string& path, const std::string& body) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << body;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::string body;
    for (const auto& c : table.comments) body += "# " + c + "\n";
    for (size_t i = 0; i < table.columns.size(); ++i) {
        if (i) body += ',';
        body += table.columns[i];
    }
    body += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::runtime_error("write_csv: row width does not match header");
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) body += ',';
            body += row[i];
        }
        body += '\n';
    }
    atomic_write(path, body);
}

void write_json_sidecar(const std::string& path, const nlohmann::json& doc) {
    atomic_write(path, doc.dump(2) + "\n");
}

}  // namespace lpconc

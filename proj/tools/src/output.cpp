#include "qrabi_cli/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#ifndef QRABI_VERSION
#define QRABI_VERSION "0.0.0"
#endif

namespace qrabi::cli {

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row has the wrong number of cells");
    rows.push_back(std::move(row));
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

std::string fmt(int v) { return std::to_string(v); }

std::string config_digest(const json& resolved) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : resolved.dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::filesystem::path prepare(const std::string& dir, const std::string& file) {
    std::filesystem::path d(dir.empty() ? "." : dir);
    std::error_code ec;
    std::filesystem::create_directories(d, ec);
    if (ec) throw ConfigError("cannot create output directory '" + d.string() + "': " + ec.message());
    return d / file;
}

}  // namespace

std::string write_csv(const std::string& dir, const std::string& name, const Table& t,
                      const std::vector<std::pair<std::string, std::string>>& meta) {
    const auto path = prepare(dir, name + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    for (const auto& [k, v] : meta) out << "# " << k << ": " << v << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    return path.string();
}

std::string write_json(const std::string& dir, const std::string& name, const json& j) {
    const auto path = prepare(dir, name + ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    return path.string();
}

const char* version() { return QRABI_VERSION; }

}  // namespace qrabi::cli

#pragma once

#include <string>
#include <vector>

#include "qrabi_cli/config.hpp"

namespace qrabi::cli {

// Column-oriented table written as CSV with '#' metadata lines before the header.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

std::string fmt(double v);  // shortest round-trip representation
std::string fmt(int v);

// FNV-1a digest of the compact resolved-config dump.
std::string config_digest(const json& resolved);

// Writes <dir>/<name>.csv; `meta` lines are emitted as "# key: value".
std::string write_csv(const std::string& dir, const std::string& name, const Table& t,
                      const std::vector<std::pair<std::string, std::string>>& meta);
std::string write_json(const std::string& dir, const std::string& name, const json& j);

const char* version();

}  // namespace qrabi::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qrabi_cli/config.hpp"

namespace qrabi::cli {

struct RunOutput {
    std::vector<std::string> files;
    json metadata;
    bool numeric_failure = false;  // every unit of work failed
};

// Runs a resolved config and writes its tables plus the JSON sidecar.
RunOutput run_command(const RunConfig& cfg, std::ostream& log);

json validity_json(const RabiParams& p, int n_levels, const RateFunctions& rates);

}  // namespace qrabi::cli

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qrabi/dynamics.hpp"
#include "qrabi/rabi_exact.hpp"
#include "qrabi/rates.hpp"

namespace qrabi::cli {

using json = nlohmann::json;

// Schema or value problems in a config; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

enum class Command { spectrum, fidelity, relax, drive, spectroscopy, validate };

const char* to_string(Command c);
Command parse_command(const std::string& name);

// A rate given either as a constant or as (frequency, rate) samples.
struct RateSpec {
    double constant = 0.0;
    std::vector<std::pair<double, double>> table;

    SpectralRate function() const;
    json to_json() const;
};

struct RatesConfig {
    RateSpec Gamma;
    RateSpec gamma;
    double gamma_f = 0.0;
    double temperature = 0.0;

    RateFunctions functions() const;
};

struct SpectrumBlock {
    int levels = 10;
};

struct FidelityBlock {
    int n_states = 6;
    std::vector<double> omega0;  // empty: use params.omega0
    std::vector<double> beta;    // empty: use params.beta
};

struct RelaxBlock {
    double t_end = 0.0;  // 0: 5 / Gamma(omega)
    int samples = 50;
    std::vector<double> beta_grid{0.01, 0.02, 0.05, 0.1, 0.15, 0.2};
};

struct DriveBlock {
    std::vector<double> pump_amplitudes;  // Omega_p values
    std::optional<double> pump_frequency;  // default omega_-
};

struct SpectroscopyBlock {
    bool reference_rates = false;       // derive rates from w0 and beta (Gamma = 6 kappa = 3 gamma_f = 3 w0 b^2/5)
    std::vector<double> nbar;           // target excitation numbers; converted to pump amplitudes
    std::vector<double> pump_amplitudes;
    std::optional<double> pump_frequency;
    std::optional<double> spec_amplitude;  // default kappa at N = 0
    int points = 241;
    double x_max = 12.0;
    std::vector<double> omega_s;  // explicit grid overrides points / x_max
    std::vector<int> n_levels;    // per curve, resolved
    AveragingWindow window{};
};

struct RunConfig {
    Command command = Command::spectrum;
    RabiParams params{1.0, 0.15, 0.1};
    RatesConfig rates{};
    bool rates_set = false;  // false: relax, drive and spectroscopy use the reference rates
    int n_cut = 40;
    int n_levels = 0;  // 0: chosen per experiment
    std::string out_dir = ".";
    std::string prefix;  // defaults to the command name
    IntegratorControls integrator{};
    int threads = 1;

    SpectrumBlock spectrum{};
    FidelityBlock fidelity{};
    RelaxBlock relax{};
    DriveBlock drive{};
    SpectroscopyBlock spectroscopy{};
};

// Parses and schema-checks a config document for `command`; unknown keys are errors.
RunConfig parse_config(const json& doc, Command command);
RunConfig load_config(const std::string& path, Command command);

// Full resolved config, every default spelled out; feeding it back reproduces the run.
json to_json(const RunConfig& cfg);

// Fills experiment-dependent defaults (pump amplitudes, level counts, reference rates).
void resolve(RunConfig& cfg);

}  // namespace qrabi::cli

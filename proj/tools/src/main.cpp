#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "qrabi/errors.hpp"
#include "qrabi_cli/commands.hpp"
#include "qrabi_cli/config.hpp"
#include "qrabi_cli/output.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<int> n_cut;
    std::optional<int> n_levels;
    std::optional<int> threads;
    bool seedless = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory (overrides output.dir)");
    sub->add_option("--n-cut", f.n_cut, "Fock cutoff (overrides dims.n_cut)");
    sub->add_option("--n-levels", f.n_levels, "dressed levels per ladder (overrides dims.n_levels)");
    sub->add_option("--threads", f.threads, "worker threads for scans (overrides numerics.threads)");
    sub->add_flag("--seedless", f.seedless, "reserved");
}

int run(qrabi::cli::Command command, const Flags& f) {
    using namespace qrabi::cli;
    if (f.seedless) throw ConfigError("--seedless is reserved: no random number generator is used");
    RunConfig cfg = f.config.empty() ? parse_config(json::object(), command) : load_config(f.config, command);
    if (f.out) cfg.out_dir = *f.out;
    if (f.n_cut) cfg.n_cut = *f.n_cut;
    if (f.n_levels) cfg.n_levels = *f.n_levels;
    if (f.threads) cfg.threads = *f.threads;
    if (cfg.n_cut < 2) throw ConfigError("n_cut must be at least 2");
    if (cfg.n_levels < 0) throw ConfigError("n_levels must be non-negative");
    if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
    resolve(cfg);

    const RunOutput out = run_command(cfg, std::cerr);
    for (const auto& file : out.files) std::cout << file << '\n';
    return out.numeric_failure ? kExitNumeric : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace qrabi::cli;
    CLI::App app{"qrabi: dressed-state master equations for the quasi-degenerate Rabi model"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    Flags flags;
    std::optional<Command> chosen;
    for (Command c : {Command::spectrum, Command::fidelity, Command::relax, Command::drive, Command::spectroscopy,
                      Command::validate}) {
        CLI::App* sub = app.add_subcommand(to_string(c), "");
        add_common(sub, flags);
        sub->callback([&chosen, c] { chosen = c; });
    }
    app.get_subcommand("spectrum")->description("exact, adiabatic and Schrieffer-Wolff energy tables");
    app.get_subcommand("fidelity")->description("eigenstate fidelities over an (omega0, beta) grid");
    app.get_subcommand("relax")->description("ground-state relaxation under the standard and dressed master equations");
    app.get_subcommand("drive")->description("driven steady states of the dressed master equation");
    app.get_subcommand("spectroscopy")->description("pump-probe spectroscopy scans");
    app.get_subcommand("validate")->description("validity report for a configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        return run(*chosen, flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qrabi::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qrabi::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

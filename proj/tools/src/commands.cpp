#include "qrabi_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "qrabi/adiabatic.hpp"
#include "qrabi/dynamics.hpp"
#include "qrabi/lindblad.hpp"
#include "qrabi/linalg.hpp"
#include "qrabi/pairing.hpp"
#include "qrabi/schrieffer_wolff.hpp"
#include "qrabi/spectroscopy.hpp"
#include "qrabi_cli/output.hpp"

namespace qrabi::cli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using Meta = std::vector<std::pair<std::string, std::string>>;

struct Context {
    const RunConfig& cfg;
    json resolved;
    std::string digest;
    std::ostream& log;
    RunOutput out;
    json warnings = json::array();

    Meta csv_meta(const std::string& units) const {
        return {{"qrabi", version()},
                {"command", to_string(cfg.command)},
                {"config_digest", digest},
                {"metadata", cfg.prefix + ".json"},
                {"units", units}};
    }

    void write(const std::string& name, const Table& t, const std::string& units) {
        out.files.push_back(write_csv(cfg.out_dir, name, t, csv_meta(units)));
    }

    void warn(const std::string& w) {
        warnings.push_back(w);
        log << "warning: " << w << '\n';
    }
};

std::string branch_name(Branch b) { return to_string(b); }

// ----- spectrum -----

void cmd_spectrum(Context& c) {
    const RunConfig& cfg = c.cfg;
    const RabiParams& p = cfg.params;
    const SpaceDims dims(cfg.n_cut);
    const int keep = cfg.spectrum.levels;
    if (2 * keep > dims.total_dim()) throw ConfigError("spectrum.levels too large for dims.n_cut");

    const Spectrum exact = rabi_spectrum(p, dims, keep);

    // adiabatic pairing by overlap
    const int levels = std::max({2, (keep + 1) / 2, std::min({keep, max_levels(p.beta), dims.n_cut()})});
    const DressedBasis basis = build_basis(p, levels, dims, EnergyMode::exact_overlap);
    for (const auto& w : basis.warnings) c.warn(w);
    Matrix ex(dims.total_dim(), keep);
    for (int i = 0; i < keep; ++i) ex.col(i) = exact.states[i].vector();
    const Pairing pa = max_weight_matching(overlap_weights(ex, basis.embedding));

    std::vector<double> e_sw(keep, kNan), f_sw(keep, kNan);
    try {
        const FidelityTable ft = fidelity_comparison(p, keep, dims);
        for (const auto& r : ft.rows) {
            e_sw[r.index] = r.e_sw;
            f_sw[r.index] = r.f_sw;
        }
    } catch (const DomainError& e) {
        c.warn(std::string("Schrieffer-Wolff columns unavailable: ") + e.what());
    }

    Table t{{"index", "N", "branch", "E_exact[omega]", "E_adiabatic[omega]", "E_sw[omega]", "abs_err_adiabatic[omega]", "abs_err_sw[omega]", "f_adiabatic",
             "f_sw", "converged"},
            {}};
    double max_err = 0.0;
    for (int i = 0; i < keep; ++i) {
        const int col = pa.target[i];
        const Branch br = col < levels ? Branch::plus : Branch::minus;
        const int N = col < levels ? col : col - levels;
        const double ea = basis.energy(N, br);
        max_err = std::max(max_err, std::abs(exact.energies[i] - ea));
        t.add_row({fmt(i), fmt(N), branch_name(br), fmt(exact.energies[i]), fmt(ea), fmt(e_sw[i]),
                   fmt(std::abs(exact.energies[i] - ea)), fmt(std::abs(exact.energies[i] - e_sw[i])),
                   fmt(std::clamp(pa.weight[i], 0.0, 1.0)), fmt(f_sw[i]), exact.converged[i] ? "1" : "0"});
    }
    if (!exact.all_converged()) c.warn("some eigenpairs shift by more than 1e-8 omega at n_cut + 10");
    c.write(cfg.prefix, t, "energies in units of omega; fidelities dimensionless");
    c.out.metadata["diagnostics"] = {{"max_abs_err_adiabatic", max_err},
                                     {"all_converged", exact.all_converged()},
                                     {"pairing_conflicts", pa.conflicts},
                                     {"displacement_defect", basis.displacement_defect}};
}

// ----- fidelity -----

void cmd_fidelity(Context& c) {
    const RunConfig& cfg = c.cfg;
    const SpaceDims dims(cfg.n_cut);
    Table t{{"omega0[omega]", "beta", "index", "E_exact[omega]", "f_adiabatic", "f_sw", "N", "branch"}, {}};
    json points = json::array();
    int ok = 0, total = 0;
    for (double w0 : cfg.fidelity.omega0) {
        for (double beta : cfg.fidelity.beta) {
            ++total;
            RabiParams p = cfg.params;
            p.omega0 = w0;
            p.beta = beta;
            try {
                const FidelityTable ft = fidelity_comparison(p, cfg.fidelity.n_states, dims);
                for (const auto& r : ft.rows) {
                    t.add_row({fmt(w0), fmt(beta), fmt(r.index), fmt(r.energy), fmt(r.f_adiabatic), fmt(r.f_sw),
                               fmt(r.adiabatic_N), branch_name(r.adiabatic_branch)});
                }
                points.push_back({{"omega0", w0},
                                  {"beta", beta},
                                  {"mean_f_adiabatic", ft.mean_adiabatic()},
                                  {"mean_f_sw", ft.mean_sw()},
                                  {"conflicts_adiabatic", ft.conflicts_adiabatic},
                                  {"conflicts_sw", ft.conflicts_sw}});
                ++ok;
            } catch (const std::exception& e) {
                points.push_back({{"omega0", w0}, {"beta", beta}, {"error", e.what()}});
                c.warn("point omega0=" + fmt(w0) + " beta=" + fmt(beta) + " failed: " + e.what());
            }
        }
    }
    c.write(cfg.prefix, t, "energies in units of omega; fidelities dimensionless");
    c.out.metadata["diagnostics"] = {{"points", points}};
    c.out.numeric_failure = ok == 0 && total > 0;
}

// ----- relax -----

void cmd_relax(Context& c) {
    const RunConfig& cfg = c.cfg;
    const RabiParams& p = cfg.params;
    if (cfg.rates.temperature != 0.0) throw ConfigError("relax compares zero-temperature generators; set rates.temperature to 0");
    const SpaceDims dims(cfg.n_cut);
    const RateFunctions rates = cfg.rates.functions();
    const DressedBasis b = build_basis(p, cfg.n_levels, dims, EnergyMode::exact_overlap);
    for (const auto& w : b.warnings) c.warn(w);

    IntegratorControls ic = cfg.integrator;
    ic.store_interval = cfg.relax.t_end / cfg.relax.samples;

    // DME in dressed coordinates from |Psi_0^->.
    const MasterEquation dme = build_dme_zero_t(b, rates);
    Matrix rho_d = Matrix::Zero(b.size(), b.size());
    const int g_idx = b.index(0, Branch::minus);
    rho_d(g_idx, g_idx) = 1.0;
    Matrix proj_d = Matrix::Zero(b.size(), b.size());
    proj_d(g_idx, g_idx) = 1.0;
    const Trajectory td = evolve(dme, rho_d, cfg.relax.t_end, ic, {{"F", proj_d}});

    // SME in the joint space from the exact ground state.
    const MasterEquation sme = build_sme(p, rates, dims);
    const GroundState gs = ground_state(p, dims);
    const Vector& g = gs.state.vector();
    const Vector& psi = b.state(0, Branch::minus).vector();
    const Matrix rho_s = g * g.adjoint();
    const Trajectory ts = evolve(sme, rho_s, cfg.relax.t_end, ic, {{"F_ground", g * g.adjoint()}, {"F_dressed", psi * psi.adjoint()}});

    Table t{{"t[1/omega]", "F_dme", "F_sme", "F_sme_dressed"}, {}};
    const auto& fd = td.series("F");
    const auto& fg = ts.series("F_ground");
    const auto& fp = ts.series("F_dressed");
    for (std::size_t i = 0; i < td.times.size(); ++i) t.add_row({fmt(td.times[i]), fmt(fd[i]), fmt(fg[i]), fmt(fp[i])});
    c.write(cfg.prefix, t,
            "t in units of 1/omega; F_dme = <Psi_0^-|rho_DME|Psi_0^->, F_sme = <G|rho_SME|G> for the exact ground state G, "
            "F_sme_dressed = <Psi_0^-|rho_SME|Psi_0^->");

    Table dt{{"beta", "d", "one_minus_exp", "beta2_over_2", "abs_diff_exp", "abs_diff_beta2"}, {}};
    for (double beta : cfg.relax.beta_grid) {
        RabiParams q = p;
        q.beta = beta;
        const Ket g0 = basis_ket(Qubit::ground, 0, dims);
        const DressedBasis bq = build_basis(q, 2, dims, EnergyMode::exact_overlap);
        const double d = 1.0 - std::abs(bq.state(0, Branch::minus).inner(g0));
        const double e = 1.0 - std::exp(-beta * beta / 2.0);
        dt.add_row({fmt(beta), fmt(d), fmt(e), fmt(beta * beta / 2.0), fmt(std::abs(d - e)), fmt(std::abs(d - beta * beta / 2.0))});
    }
    c.out.files.push_back(write_csv(cfg.out_dir, cfg.prefix + "_distance", dt, c.csv_meta("dimensionless")));

    c.out.metadata["diagnostics"] = {{"dme", {{"steps", td.steps}, {"halvings", td.halvings}, {"max_trace_drift", td.max_trace_drift}, {"min_eigenvalue", td.min_eigenvalue}}},
                                     {"sme", {{"steps", ts.steps}, {"halvings", ts.halvings}, {"max_trace_drift", ts.max_trace_drift}, {"min_eigenvalue", ts.min_eigenvalue}}},
                                     {"final_F_dme", fd.back()},
                                     {"final_F_sme", fg.back()}};
}

// ----- drive -----

void cmd_drive(Context& c) {
    const RunConfig& cfg = c.cfg;
    const RabiParams& p = cfg.params;
    const RateFunctions rates = cfg.rates.functions();
    const DressedBasis b = build_basis(p, cfg.n_levels, SpaceDims(cfg.n_cut), EnergyMode::truncated);
    for (const auto& w : b.warnings) c.warn(w);
    const double wp = *cfg.drive.pump_frequency;
    const double Gamma = rates.oscillator(b.omega_minus);
    const std::vector<Observable> obs = dressed_observables(b);

    Table t{{"pump_amplitude[omega]", "pump_frequency[omega]", "N_minus", "N_plus", "N_total", "sector_plus", "alpha_re", "alpha_im",
             "fidelity_alpha", "top_rung", "residual"},
            {}};
    json rows = json::array();
    for (double amp : cfg.drive.pump_amplitudes) {
        const MasterEquation me = build_driven_rotating(b, rates, {amp, wp});
        const SteadyState ss = steady_state_nullspace(me);
        if (ss.degenerate) throw NumericError("driven steady state is degenerate");
        const ObservableRecord o = observables(ss.rho, b, Representation::dressed);
        const Complex alpha = coherent_amplitude(amp, Gamma, b.omega_minus - wp);
        const double f = state_fidelity(coherent_dressed(b, alpha, Branch::minus), ss.rho);
        const int top = b.n_levels - 1;
        const double top_rung = ss.rho(b.index(top, Branch::plus), b.index(top, Branch::plus)).real() +
                                ss.rho(b.index(top, Branch::minus), b.index(top, Branch::minus)).real();
        t.add_row({fmt(amp), fmt(wp), fmt(o.n_minus), fmt(o.n_plus), fmt(o.n_total), fmt(o.sector_plus), fmt(alpha.real()),
                   fmt(alpha.imag()), fmt(f), fmt(top_rung), fmt(ss.residual)});
        rows.push_back({{"pump_amplitude", amp}, {"clipped_weight", ss.clipped_weight}, {"residual", ss.residual}});
        if (top_rung > 1e-4) c.warn("pump amplitude " + fmt(amp) + ": top rung population " + fmt(top_rung) + " above 1e-4");
    }
    c.write(cfg.prefix, t, "frequencies and amplitudes in units of omega; populations dimensionless");
    c.out.metadata["diagnostics"] = {{"steady_states", rows}, {"Gamma_minus", Gamma}};
}

// ----- spectroscopy -----

void cmd_spectroscopy(Context& c) {
    const RunConfig& cfg = c.cfg;
    const auto& s = cfg.spectroscopy;
    Table combined{{"curve", "pump_amplitude[omega]", "baseline_n_ss", "omega_s[omega]", "x", "n_ss", "percent_reduction"}, {}};
    json curves = json::array();
    int failed = 0, total = 0;
    for (std::size_t k = 0; k < s.pump_amplitudes.size(); ++k) {
        SpectroscopyConfig sc;
        sc.params = cfg.params;
        sc.rates = cfg.rates.functions();
        sc.pump = {s.pump_amplitudes[k], *s.pump_frequency};
        sc.spec_amplitude = *s.spec_amplitude;
        sc.omega_s_grid = s.omega_s;
        sc.n_levels = s.n_levels[k];
        sc.n_cut = cfg.n_cut;
        sc.window = s.window;
        sc.integrator = cfg.integrator;
        sc.threads = cfg.threads;
        c.log << "curve " << k << ": pump amplitude " << fmt(sc.pump.amplitude) << ", " << sc.omega_s_grid.size()
              << " points, n_levels " << sc.n_levels << '\n';
        const ScanResult r = run_scan(sc);
        for (const auto& w : r.warnings) c.warn("curve " + std::to_string(k) + ": " + w);

        Table t{{"omega_s[omega]", "x", "n_ss", "percent_reduction", "peak_to_peak", "top_rung", "error"}, {}};
        json failures = json::array();
        for (std::size_t i = 0; i < r.omega_s.size(); ++i) {
            t.add_row({fmt(r.omega_s[i]), fmt(r.normalized[i]), fmt(r.n_ss[i]), fmt(r.percent_reduction[i]),
                       fmt(r.peak_to_peak[i]), fmt(r.leakage[i]), r.errors[i].empty() ? "" : "failed"});
            combined.add_row({fmt(static_cast<int>(k)), fmt(sc.pump.amplitude), fmt(r.baseline_n_ss), fmt(r.omega_s[i]),
                              fmt(r.normalized[i]), fmt(r.n_ss[i]), fmt(r.percent_reduction[i])});
            if (!r.errors[i].empty()) failures.push_back({{"omega_s", r.omega_s[i]}, {"error", r.errors[i]}});
        }
        failed += r.failures();
        total += static_cast<int>(r.omega_s.size());
        c.write(cfg.prefix + "_curve" + std::to_string(k), t,
                "frequencies in units of omega; x = (omega0 - omega_s)/(2 omega0 beta^2); percent reduction of the "
                "steady excitation number");
        double max_leak = 0.0;
        for (double l : r.leakage)
            if (std::isfinite(l)) max_leak = std::max(max_leak, l);
        if (max_leak > 1e-4) c.warn("curve " + std::to_string(k) + ": top rung population " + fmt(max_leak) + " above 1e-4");
        curves.push_back({{"pump_amplitude", sc.pump.amplitude},
                          {"n_levels", sc.n_levels},
                          {"baseline_n_ss", r.baseline_n_ss},
                          {"baseline_n_minus", r.baseline_n_minus},
                          {"label_n_minus", r.label_n_minus},
                          {"predicted_resonances", r.predicted_resonances},
                          {"window", {{"t_start", r.window.t_start}, {"length", r.window.length}}},
                          {"max_top_rung", max_leak},
                          {"failures", failures},
                          {"wall_seconds", r.wall_seconds}});
    }
    c.write(cfg.prefix, combined, "frequencies in units of omega; percent reduction of the steady excitation number");
    c.out.metadata["diagnostics"] = {{"curves", curves},
                                     {"failed_points", failed},
                                     {"intra_ladder_tones_dropped", true},
                                     {"normalization", "raw percent reduction per curve, no rescaling"}};
    c.out.numeric_failure = total > 0 && failed == total;
    if (failed > 0) c.warn(std::to_string(failed) + " scan points failed; see metadata");
}

// ----- validate -----

void cmd_validate(Context& c) {
    const RunConfig& cfg = c.cfg;
    const json report = validity_json(cfg.params, cfg.n_levels, cfg.rates.functions());
    Table t{{"check", "ok", "margin"}, {}};
    t.add_row({"quasi_degenerate", report["quasi_degenerate"].get<bool>() ? "1" : "0", fmt(report["quasi_degenerate_margin"].get<double>())});
    t.add_row({"beta_ok", report["beta_ok"].get<bool>() ? "1" : "0", fmt(report["beta_margin"].get<double>())});
    t.add_row({"levels_ok", report["levels_ok"].get<bool>() ? "1" : "0", fmt(static_cast<double>(report["n_max"].get<int>() - cfg.n_levels))});
    t.add_row({"secular_ok", report["secular_ok"].get<bool>() ? "1" : "0", fmt(report["secular_margin"].get<double>())});
    c.write(cfg.prefix, t, "margins in units of omega except secular (spacing / rate ratio) and levels (count)");
    c.log << report.dump(2) << '\n';
}

}  // namespace

json validity_json(const RabiParams& p, int n_levels, const RateFunctions& rates) {
    const ValidityReport r = validity_report(p, n_levels, rates);
    return {{"quasi_degenerate", r.quasi_degenerate},
            {"quasi_degenerate_margin", r.quasi_degenerate_margin},
            {"beta_ok", r.beta_ok},
            {"beta_margin", r.beta_margin},
            {"n_max", r.n_max},
            {"n_levels", n_levels},
            {"levels_ok", r.levels_ok},
            {"secular_ok", r.secular_ok},
            {"secular_margin", r.secular_margin},
            {"min_spacing", r.min_spacing},
            {"max_rate", r.max_rate},
            {"warnings", r.warnings}};
}

RunOutput run_command(const RunConfig& cfg, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    Context c{cfg, to_json(cfg), "", log, {}, json::array()};
    json physics = c.resolved;
    physics.erase("output");  // relocating a run keeps its digest
    c.digest = config_digest(physics);
    c.out.metadata["qrabi_version"] = version();
    c.out.metadata["command"] = to_string(cfg.command);
    c.out.metadata["config_digest"] = c.digest;
    c.out.metadata["resolved_config"] = c.resolved;
    const int levels_for_report = cfg.n_levels > 0 ? cfg.n_levels
                                  : cfg.spectroscopy.n_levels.empty() ? 2
                                                                      : cfg.spectroscopy.n_levels.front();
    c.out.metadata["validity"] = validity_json(cfg.params, levels_for_report, cfg.rates.functions());

    switch (cfg.command) {
        case Command::spectrum: cmd_spectrum(c); break;
        case Command::fidelity: cmd_fidelity(c); break;
        case Command::relax: cmd_relax(c); break;
        case Command::drive: cmd_drive(c); break;
        case Command::spectroscopy: cmd_spectroscopy(c); break;
        case Command::validate: cmd_validate(c); break;
    }
    c.out.metadata["warnings"] = c.warnings;
    c.out.metadata["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.out.files.push_back(write_json(cfg.out_dir, cfg.prefix, c.out.metadata));
    return std::move(c.out);
}

}  // namespace qrabi::cli

#include "qrabi/spectroscopy.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "qrabi/linalg.hpp"

namespace qrabi {

int ScanResult::failures() const {
    return static_cast<int>(std::count_if(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); }));
}

std::vector<double> predicted_resonances(const RabiParams& p, int n_max) {
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    std::vector<double> r;
    for (int N = 0; N < n_max; ++N) r.push_back(dressed_transition_frequency(p, N));
    return r;
}

double normalized_position(const RabiParams& p, double omega_s) {
    const double unit = 2.0 * p.omega0 * p.beta * p.beta;
    if (unit == 0.0) throw DomainError("normalized position undefined for omega0 = 0 or beta = 0");
    return (p.omega0 - omega_s) / unit;
}

double omega_s_at(const RabiParams& p, double normalized) {
    return p.omega0 - normalized * 2.0 * p.omega0 * p.beta * p.beta;
}

std::vector<double> normalized_grid(const RabiParams& p, int points, double x_max) {
    if (points < 2) throw DomainError("grid needs at least two points");
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(omega_s_at(p, x_max * i / (points - 1)));
    return g;
}

double dissipated_power(double n_ss, double omega_p, const SpectralRate& Gamma) {
    if (!(n_ss >= 0.0)) throw DomainError("n_ss must be non-negative");
    return omega_p * Gamma(omega_p) * n_ss / 2.0;
}

double pump_amplitude_for(double nbar, double Gamma) {
    if (!(nbar >= 0.0)) throw DomainError("target excitation number must be non-negative");
    return std::sqrt(nbar) * Gamma / 2.0;
}

int levels_for_occupation(double nbar, double tail) {
    if (!(nbar >= 0.0)) throw DomainError("occupation must be non-negative");
    if (!(tail > 0.0 && tail < 1.0)) throw DomainError("tail must lie in (0, 1)");
    // smallest ladder whose top rung carries at most `tail` of a Poisson(nbar) distribution
    double p = std::exp(-nbar);
    int n = 1;
    for (; n < 200; ++n) {
        if (n >= 8 && p <= tail) break;
        p *= nbar / n;
    }
    return n;
}

SpectroscopyConfig reference_config(const RabiParams& p, double nbar) {
    const double b2 = p.beta * p.beta;
    const double Gamma = 3.0 * p.omega0 * b2 / 5.0;
    const double kappa = Gamma / 6.0;
    // gamma + 4 b^2 Gamma = kappa
    const double gamma0 = kappa - 4.0 * b2 * Gamma;
    if (!(gamma0 >= 0.0)) throw DomainError("reference rates need 4 beta^2 <= 1/6");
    SpectroscopyConfig cfg;
    cfg.params = p;
    cfg.rates = RateFunctions::flat(Gamma, gamma0, Gamma / 3.0, 0.0);
    cfg.pump = {pump_amplitude_for(nbar, Gamma), ladder_frequency(p, Branch::minus)};
    cfg.spec_amplitude = kappa;
    cfg.omega_s_grid = normalized_grid(p);
    cfg.n_levels = std::min(levels_for_occupation(nbar), std::max(2, max_levels(p.beta)));
    cfg.n_cut = std::max(40, 2 * cfg.n_levels);
    cfg.integrator.dt = 3.0;
    cfg.integrator.tolerance = 5e-8;
    cfg.integrator.check_every = 256;
    return cfg;
}

std::vector<std::string> SpectroscopyConfig::validate() const {
    params.validate();
    rates.validate();
    std::vector<std::string> warnings;
    if (n_levels < 2) throw DomainError("n_levels must be >= 2");
    if (threads < 1) throw DomainError("threads must be >= 1");
    if (!(spec_amplitude >= 0.0)) throw DomainError("spectroscopy amplitude must be non-negative");
    if (omega_s_grid.empty()) throw DomainError("omega_s grid is empty");
    for (double w : omega_s_grid) {
        if (!(w > 0.0) || w > 1.2 * params.omega0 * (1.0 + 1e-12)) {
            throw DomainError("omega_s grid value " + std::to_string(w) + " outside (0, 1.2 omega0]");
        }
    }
    const double w_minus = ladder_frequency(params, Branch::minus);
    const double Gamma = rates.oscillator(w_minus);
    if (std::abs(pump.frequency - w_minus) > Gamma) {
        warnings.push_back("pump frequency more than Gamma away from omega_-");
    }
    return warnings;
}

namespace {

double top_rung_population(const Matrix& rho, const DressedBasis& b) {
    const int top = b.n_levels - 1;
    return rho(b.index(top, Branch::plus), b.index(top, Branch::plus)).real() +
           rho(b.index(top, Branch::minus), b.index(top, Branch::minus)).real();
}

}  // namespace

ScanResult run_scan(const SpectroscopyConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ScanResult r;
    r.warnings = cfg.validate();
    const DressedBasis b = build_basis(cfg.params, cfg.n_levels, SpaceDims(cfg.n_cut), EnergyMode::truncated);
    r.warnings.insert(r.warnings.end(), b.warnings.begin(), b.warnings.end());
    const MasterEquation base = build_driven_rotating(b, cfg.rates, cfg.pump);
    const SteadyState ss0 = steady_state_nullspace(base);
    if (ss0.degenerate) throw NumericError("baseline steady state is degenerate");
    const ObservableRecord o0 = observables(ss0.rho, b, Representation::dressed);
    r.baseline_n_ss = o0.n_total;
    r.baseline_n_minus = o0.n_minus;
    if (!(r.baseline_n_ss > 0.0)) throw NumericError("baseline excitation number is not positive");
    const double Gamma = cfg.rates.oscillator(b.omega_minus);
    r.label_n_minus = 4.0 * cfg.pump.amplitude * cfg.pump.amplitude / (Gamma * Gamma);
    r.pump_amplitude = cfg.pump.amplitude;
    r.predicted_resonances = predicted_resonances(cfg.params, cfg.n_levels);

    const std::size_t n = cfg.omega_s_grid.size();
    r.omega_s = cfg.omega_s_grid;
    r.normalized.resize(n);
    r.n_ss.assign(n, std::numeric_limits<double>::quiet_NaN());
    r.percent_reduction.assign(n, std::numeric_limits<double>::quiet_NaN());
    r.peak_to_peak.assign(n, std::numeric_limits<double>::quiet_NaN());
    r.leakage.assign(n, std::numeric_limits<double>::quiet_NaN());
    r.errors.assign(n, "");
    for (std::size_t i = 0; i < n; ++i) {
        r.normalized[i] = cfg.params.beta != 0.0 && cfg.params.omega0 != 0.0 ? normalized_position(cfg.params, r.omega_s[i])
                                                                              : 0.0;
    }

    const std::vector<Observable> obs = dressed_observables(b);
    if (cfg.spec_amplitude > 0.0) {
        MasterEquation probe = add_spectroscopy_tone(base, b, {cfg.spec_amplitude, r.omega_s.front()}, cfg.pump.frequency);
        r.window = resolve_window(probe, cfg.window);
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                if (cfg.spec_amplitude == 0.0) {
                    r.n_ss[i] = r.baseline_n_ss;
                    r.peak_to_peak[i] = 0.0;
                    r.leakage[i] = top_rung_population(ss0.rho, b);
                } else {
                    const MasterEquation me =
                        add_spectroscopy_tone(base, b, {cfg.spec_amplitude, r.omega_s[i]}, cfg.pump.frequency);
                    const SteadyState s = steady_state_timeaveraged(me, ss0.rho, cfg.window, cfg.integrator, obs);
                    r.n_ss[i] = s.average("N_total");
                    r.peak_to_peak[i] = s.peak_to_peak[2];
                    r.leakage[i] = top_rung_population(s.rho, b);
                }
                r.percent_reduction[i] = 100.0 * (r.baseline_n_ss - r.n_ss[i]) / r.baseline_n_ss;
            } catch (const std::exception& e) {
                r.errors[i] = e.what();
            }
        }
    };
    const int nt = std::max(1, std::min<int>(cfg.threads, static_cast<int>(n)));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < nt; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<ScanResult> pump_family(const SpectroscopyConfig& cfg, const std::vector<double>& pump_amplitudes) {
    std::vector<ScanResult> out;
    for (double a : pump_amplitudes) {
        SpectroscopyConfig c = cfg;
        c.pump.amplitude = a;
        out.push_back(run_scan(c));
    }
    return out;
}

std::vector<double> local_maxima(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionError("local_maxima: size mismatch");
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) out.push_back(x[i]);
    }
    return out;
}

double peak_near(const std::vector<double>& x, const std::vector<double>& y, double x0, double half_width) {
    if (x.size() != y.size()) throw DimensionError("peak_near: size mismatch");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - x0) <= half_width && std::isfinite(y[i])) best = std::max(best, y[i]);
    return best;
}

}  // namespace qrabi

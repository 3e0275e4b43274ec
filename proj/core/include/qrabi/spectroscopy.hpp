#pragma once

#include <string>
#include <vector>

#include "qrabi/adiabatic.hpp"
#include "qrabi/dynamics.hpp"
#include "qrabi/lindblad.hpp"

namespace qrabi {

struct SpectroscopyConfig {
    RabiParams params;
    RateFunctions rates;
    Pump pump{};
    double spec_amplitude = 0.0;  // Omega_s
    std::vector<double> omega_s_grid;
    int n_levels = 12;
    int n_cut = 40;
    AveragingWindow window{};
    IntegratorControls integrator{};
    int threads = 1;

    // Throws DomainError on hard violations; returns soft warnings.
    std::vector<std::string> validate() const;
};

struct ScanResult {
    std::vector<double> omega_s;
    std::vector<double> normalized;  // (w0 - ws)/(2 w0 b^2)
    std::vector<double> n_ss;
    std::vector<double> percent_reduction;
    std::vector<double> peak_to_peak;  // of N_total over the averaging window
    std::vector<double> leakage;       // probability left in the top rungs
    std::vector<std::string> errors;   // empty string when the point succeeded
    double baseline_n_ss = 0.0;
    double baseline_n_minus = 0.0;
    double label_n_minus = 0.0;        // 4 Omega_p^2 / Gamma^2 (zero detuning)
    double pump_amplitude = 0.0;
    std::vector<double> predicted_resonances;
    AveragingWindow window{};
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;

    int failures() const;
};

std::vector<double> predicted_resonances(const RabiParams& p, int n_max);
double normalized_position(const RabiParams& p, double omega_s);
double omega_s_at(const RabiParams& p, double normalized);
// Uniform grid in normalized position over [0, x_max].
std::vector<double> normalized_grid(const RabiParams& p, int points = 241, double x_max = 12.0);

double dissipated_power(double n_ss, double omega_p, const SpectralRate& Gamma);

// Omega_p giving the zero-detuning excitation number 4 Omega_p^2/Gamma^2 = nbar.
double pump_amplitude_for(double nbar, double Gamma);

// Smallest ladder length (>= 8) whose top rung holds at most `tail` of a Poisson(nbar) population.
int levels_for_occupation(double nbar, double tail = 1e-5);

// Gamma = 6 kappa = 3 gamma_f = 3 w0 b^2/5, Omega_s = kappa, pump resonant with HO^-.
SpectroscopyConfig reference_config(const RabiParams& p, double nbar);

ScanResult run_scan(const SpectroscopyConfig& cfg);
std::vector<ScanResult> pump_family(const SpectroscopyConfig& cfg, const std::vector<double>& pump_amplitudes);

// Positions of strict local maxima of y(x) (interior points).
std::vector<double> local_maxima(const std::vector<double>& x, const std::vector<double>& y);
// Largest y with |x - x0| <= half_width.
double peak_near(const std::vector<double>& x, const std::vector<double>& y, double x0, double half_width);

}  // namespace qrabi

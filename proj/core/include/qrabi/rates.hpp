#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace qrabi {

using SpectralRate = std::function<double(double)>;

// Bath spectral rates as functions of transition frequency, plus dephasing and temperature.
struct RateFunctions {
    SpectralRate Gamma;   // oscillator bath
    SpectralRate gamma;   // qubit bath
    double gamma_f = 0.0;
    double temperature = 0.0;

    static RateFunctions flat(double Gamma0, double gamma0, double gamma_f = 0.0, double temperature = 0.0);

    // Evaluate with the non-negativity check; throws DomainError on a negative rate.
    double oscillator(double w) const;
    double qubit(double w) const;

    void validate() const;
};

SpectralRate constant_rate(double value);
// Piecewise-linear interpolation of (frequency, rate) samples, flat beyond the end points.
SpectralRate tabulated_rate(std::vector<std::pair<double, double>> samples);

}  // namespace qrabi

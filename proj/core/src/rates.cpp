#include "qrabi/rates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrabi/errors.hpp"

namespace qrabi {

SpectralRate constant_rate(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw DomainError("rates must be finite and non-negative");
    return [value](double) { return value; };
}

SpectralRate tabulated_rate(std::vector<std::pair<double, double>> samples) {
    if (samples.empty()) throw DomainError("tabulated rate needs at least one sample");
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].second >= 0.0)) throw DomainError("tabulated rate values must be non-negative");
        if (i > 0 && samples[i].first == samples[i - 1].first) throw DomainError("duplicate frequency in rate table");
    }
    return [s = std::move(samples)](double w) {
        if (w <= s.front().first) return s.front().second;
        if (w >= s.back().first) return s.back().second;
        auto hi = std::upper_bound(s.begin(), s.end(), w, [](double x, const auto& p) { return x < p.first; });
        auto lo = hi - 1;
        const double t = (w - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    };
}

RateFunctions RateFunctions::flat(double Gamma0, double gamma0, double gamma_f, double temperature) {
    RateFunctions r{constant_rate(Gamma0), constant_rate(gamma0), gamma_f, temperature};
    r.validate();
    return r;
}

namespace {

double checked(const SpectralRate& f, double w, const char* name) {
    if (!f) throw DomainError(std::string(name) + " rate function not set");
    const double v = f(w);
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + "(" + std::to_string(w) + ") = " + std::to_string(v) + " is not a valid rate");
    }
    return v;
}

}  // namespace

double RateFunctions::oscillator(double w) const { return checked(Gamma, w, "Gamma"); }
double RateFunctions::qubit(double w) const { return checked(gamma, w, "gamma"); }

void RateFunctions::validate() const {
    if (!Gamma || !gamma) throw DomainError("rate functions not set");
    if (!(gamma_f >= 0.0) || !std::isfinite(gamma_f)) throw DomainError("gamma_f must be non-negative");
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw DomainError("temperature must be non-negative");
}

}  // namespace qrabi

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrabi/adiabatic.hpp"
#include "qrabi/hilbert.hpp"
#include "qrabi/rabi_exact.hpp"
#include "qrabi/rates.hpp"

namespace qrabi {

struct JumpTerm {
    double rate;
    Operator op;
    std::string label;
    double frequency = 0.0;  // transition frequency carried by the jump (negative for absorption)
};

struct DephasingTerm {
    double rate;
    Operator op;  // Hermitian
};

// Contributes amplitude * e^{-i frequency t} * op + h.c. to the Hamiltonian.
struct DriveTone {
    Operator op;
    Complex amplitude;
    double frequency;
    std::string label;
};

struct ThermalPair {
    std::size_t down;  // index into jumps
    std::size_t up;
    double frequency;
};

// drho/dt = -i[H + h(t), rho] + sum_k rate_k D[L_k] rho - (gamma_f/2)[S_z,[S_z,rho]]
// with D[O] rho = (2 O rho O^dag - O^dag O rho - rho O^dag O)/2.
struct MasterEquation {
    explicit MasterEquation(Operator h, Representation r = Representation::joint)
        : rep(r), hamiltonian(std::move(h)) {}

    Representation rep;
    Operator hamiltonian;
    std::vector<JumpTerm> jumps;
    std::optional<DephasingTerm> dephasing;
    std::vector<DriveTone> drive;
    std::vector<ThermalPair> thermal_pairs;
    double frame_frequency = 0.0;  // nonzero once a rotating frame at the pump frequency is applied
    std::vector<std::string> notes;

    const SpaceDims& dims() const { return hamiltonian.dims(); }
    int dim() const { return hamiltonian.dim(); }
    bool time_dependent() const { return !drive.empty(); }

    void validate() const;
    Matrix hamiltonian_at(double t) const;
    Matrix apply(const Matrix& rho, double t = 0.0) const;
};

Matrix dissipator_apply(const Matrix& op, const Matrix& rho);
Matrix dissipator_apply(const Operator& op, const DensityMatrix& rho);

// Column-stacking superoperator: vec(A X B) = (B^T (x) A) vec(X).
Matrix liouvillian(const MasterEquation& me, double t = 0.0);

struct SmeRates {
    std::optional<double> kappa;  // default Gamma(omega)
    std::optional<double> gamma;  // default gamma(omega0)
};

MasterEquation build_sme(const RabiParams& p, const RateFunctions& rates, SpaceDims dims, const SmeRates& overrides = {});

// Dressed-coordinate generators.
MasterEquation build_dme_zero_t(const DressedBasis& b, const RateFunctions& rates);
MasterEquation build_dme_finite_t(const DressedBasis& b, const RateFunctions& rates);

Operator build_sz(const DressedBasis& b, Representation rep = Representation::joint);

MasterEquation add_dephasing(MasterEquation me, double gamma_f, const Operator& sz);

struct Pump {
    double amplitude;  // Omega_p
    double frequency;  // omega_p
};

MasterEquation build_driven_rotating(const DressedBasis& b, const RateFunctions& rates, const Pump& pump);

struct SpectroscopyTone {
    double amplitude;  // Omega_s
    double frequency;  // omega_s
};

MasterEquation add_spectroscopy_tone(MasterEquation me, const DressedBasis& b, const SpectroscopyTone& tone,
                                     double pump_frequency);

// Total cross-ladder transfer rate gamma(w~_N) + 4 b^2 Gamma(w~_N).
double cross_rate(const RabiParams& p, const RateFunctions& rates, int N);

// Coherent amplitude Omega_p / (i Gamma/2 - Delta).
Complex coherent_amplitude(double omega_p_amplitude, double Gamma, double detuning);

}  // namespace qrabi

#pragma once

#include <vector>

#include "qrabi/adiabatic.hpp"
#include "qrabi/hilbert.hpp"
#include "qrabi/rabi_exact.hpp"

namespace qrabi {

// Coefficient of sigma_z (a + a^dag)^2: w0 w^2 b^2 / (w0^2 - w^2).
double sw_dispersive_coefficient(const RabiParams& p);

// Constant that second-order conjugation adds on top of the displayed H_SW:
// -w^2 b^2 (1/(w + w0) + 1/(w - w0)) / 2.
double sw_constant_shift(const RabiParams& p);

// w0 sigma_z/2 + w a^dag a + chi sigma_z (a + a^dag)^2
Operator build_h_sw(const RabiParams& p, SpaceDims dims);

// Anti-Hermitian generator removing the coupling to first order: [H0, S] = -V.
Operator sw_generator(const RabiParams& p, SpaceDims dims);

struct SwEnergy {
    int N;
    Branch branch;
    double closed_form;  // +-w0/2 + w~_+-(N + 1/2)
    double simplified;   // same with w~_+- -> w -+ 2 w0 b^2
    double adiabatic;    // truncated-mode E_N^+-
};

struct SwEnergyTable {
    double omega_tilde_plus = 0.0;
    double omega_tilde_minus = 0.0;
    double simplified_plus = 0.0;
    double simplified_minus = 0.0;
    std::vector<SwEnergy> rows;
    // max |(simplified - w/2) - adiabatic| over the table
    double alignment_defect = 0.0;
};

SwEnergyTable sw_energies(const RabiParams& p, int n_levels);

struct FidelityRow {
    int index;           // exact eigenstate index (ascending energy)
    double energy;
    double f_adiabatic;
    int adiabatic_N;
    Branch adiabatic_branch;
    double f_sw;
    int sw_index;        // index of the paired H_SW eigenvector
    double e_adiabatic;  // exact_overlap energy of the paired dressed state
    double e_sw;         // paired H_SW eigenvalue plus the constant shift
};

struct FidelityTable {
    RabiParams params;
    std::vector<FidelityRow> rows;
    int conflicts_adiabatic = 0;
    int conflicts_sw = 0;

    double mean_adiabatic() const;
    double mean_sw() const;
};

FidelityTable fidelity_comparison(const RabiParams& p, int n_states, SpaceDims dims);

struct SwResult {
    Operator h_sw;
    SwEnergyTable energies;
    std::vector<Ket> eigenvectors;  // e^S |Psi_SW>, lowest first
    FidelityTable fidelities;
};

SwResult sw_analysis(const RabiParams& p, int n_states, SpaceDims dims);

}  // namespace qrabi

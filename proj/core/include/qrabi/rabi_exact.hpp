#pragma once

#include <functional>
#include <vector>

#include "qrabi/hilbert.hpp"

namespace qrabi {

struct RabiParams {
    double omega = 1.0;
    double omega0 = 0.0;
    double beta = 0.0;

    // Throws DomainError unless omega > 0, omega0 >= 0 and all values finite.
    void validate() const;

    bool quasi_degenerate() const { return omega0 <= 0.3 * omega; }
    bool coupling_ok() const { return std::abs(beta) <= 0.2; }
};

inline constexpr int kConvergenceStep = 10;
inline constexpr double kConvergenceTol = 1e-8;

struct Spectrum {
    std::vector<double> energies;  // ascending
    std::vector<Ket> states;
    std::vector<int> parity;       // +1 / -1, 0 when the Hamiltonian breaks parity
    bool convergence_checked = false;
    std::vector<double> shift;     // |E_k(n_cut) - E_k(n_cut + 10)|
    std::vector<bool> converged;

    int size() const { return static_cast<int>(energies.size()); }
    bool all_converged() const;
};

Operator build_h_rabi(const RabiParams& p, SpaceDims dims);

// Lowest `keep` eigenpairs. Hamiltonians commuting with the parity operator are solved per
// parity block so degenerate levels come out as parity eigenstates.
Spectrum diagonalize(const Operator& h, int keep);

using HamiltonianBuilder = std::function<Operator(SpaceDims)>;

// As above, plus the per-eigenpair convergence rule against a rebuild at n_cut + 10.
Spectrum diagonalize(const HamiltonianBuilder& build, SpaceDims dims, int keep, double energy_scale = 1.0);

Spectrum rabi_spectrum(const RabiParams& p, SpaceDims dims, int keep);

struct GroundState {
    double energy;
    Ket state;
};

GroundState ground_state(const RabiParams& p, SpaceDims dims);

}  // namespace qrabi

#pragma once

#include <string>
#include <vector>

#include "qrabi/hilbert.hpp"
#include "qrabi/rabi_exact.hpp"
#include "qrabi/rates.hpp"

namespace qrabi {

enum class Branch { plus, minus };
enum class EnergyMode { exact_overlap, truncated };

// Joint: operators on the qubit (x) oscillator space. Dressed: 2 n_levels coordinates,
// plus ladder first (index N), minus ladder second (index n_levels + N).
enum class Representation { joint, dressed };

inline int sign(Branch b) { return b == Branch::plus ? 1 : -1; }
const char* to_string(Branch b);

double laguerre(int n, double x);
double overlap(int N, double beta);                          // e^{-2 b^2} L_N(4 b^2)
double ladder_frequency(const RabiParams& p, Branch b);      // w -+ 2 w0 b^2
double dressed_transition_frequency(const RabiParams& p, int N);
double adiabatic_energy(const RabiParams& p, int N, Branch b, EnergyMode mode);

int max_levels(double beta);          // floor(1/(2b)^2)
int recommended_levels(double beta);  // floor(0.25/(2b)^2)

struct DressedBasis {
    RabiParams params;
    int n_levels = 0;
    SpaceDims dims{2};
    EnergyMode mode = EnergyMode::exact_overlap;
    std::vector<Ket> states_plus, states_minus;
    std::vector<double> energies_plus, energies_minus;
    double omega_plus = 0.0, omega_minus = 0.0;
    std::vector<double> omega_tilde;
    double displacement_defect = 0.0;
    double orthonormality_defect = 0.0;
    std::vector<std::string> warnings;

    SpaceDims coords() const { return SpaceDims(n_levels); }
    int size() const { return 2 * n_levels; }
    int index(int N, Branch b) const;
    const Ket& state(int N, Branch b) const;
    double energy(int N, Branch b) const;

    // Columns are the dressed states in dressed-coordinate order (total_dim x 2 n_levels).
    Matrix embedding;

    Operator lift(const Operator& dressed) const;
    Operator compress(const Operator& joint) const;
    Matrix lift_matrix(const Matrix& dressed) const;
    Vector lift_vector(const Vector& dressed) const;
    // 1 - tr(P rho) for a joint-space state, P the projector onto the retained span.
    double leakage(const Matrix& rho_joint) const;
};

DressedBasis build_basis(const RabiParams& p, int n_levels, SpaceDims dims,
                         EnergyMode mode = EnergyMode::exact_overlap);

struct Ladders {
    Operator a_plus, a_minus, proj_plus, proj_minus;
};

Ladders build_ladders(const DressedBasis& b, Representation rep = Representation::joint);

// Always truncated-mode energies.
Operator build_h_ad(const DressedBasis& b, Representation rep = Representation::joint);

enum class Coupling { position, sigma_x };

struct MatrixElement {
    int N;
    Branch row;
    int M;
    Branch col;
    double value;
};

struct ElementTable {
    Coupling which;
    std::vector<MatrixElement> entries;  // nonzero entries only
    Operator dressed;
    Operator joint;
};

ElementTable dressed_matrix_elements(const DressedBasis& b, Coupling which);

// <Psi_j|op|Psi_k> computed by projection of a joint-space operator.
Matrix numeric_matrix_elements(const DressedBasis& b, const Operator& joint_op);

// S = a_- + a_+ - 2 b sum_N |Psi_N^-><Psi_N^+|
Operator dressed_lowering_S(const DressedBasis& b, Representation rep = Representation::joint);

// sum_{E_k > E_j} |j><k| elements(j,k), in dressed coordinates, ordered by truncated energies.
Operator lowering_from_elements(const DressedBasis& b, const Matrix& elements);

// Coherent superposition of one ladder in dressed coordinates (normalized on the retained rungs).
Vector coherent_dressed(const DressedBasis& b, Complex alpha, Branch branch);

struct ValidityReport {
    bool quasi_degenerate = true;
    double quasi_degenerate_margin = 0.0;  // 0.3 w - w0
    bool beta_ok = true;
    double beta_margin = 0.0;              // 0.2 - |b|
    int n_max = 0;
    bool levels_ok = true;
    bool secular_ok = true;
    double secular_margin = 0.0;           // min spacing / max rate
    double min_spacing = 0.0;
    double max_rate = 0.0;
    std::vector<std::string> warnings;
};

ValidityReport validity_report(const RabiParams& p, int n_levels, const RateFunctions& rates);

}  // namespace qrabi

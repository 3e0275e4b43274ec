#pragma once

#include "qrabi/hilbert.hpp"

namespace qrabi {

// ----- matrix norms -----

double max_abs(const Matrix& m);
double frobenius_norm(const Matrix& m);
double spectral_norm(const Matrix& m);
double trace_norm(const Matrix& m);

double hermiticity_defect(const Matrix& m);
Matrix hermitian_part(const Matrix& m);
double min_eigenvalue(const Matrix& hermitian);

double trace_distance(const Matrix& a, const Matrix& b);

// |<psi|rho|psi>| for a state vector psi.
double state_fidelity(const Vector& psi, const Matrix& rho);

// Hermitize, clip eigenvalues below zero, renormalize. Returns the clipped weight.
double clip_to_density(Matrix& rho);

// Gibbs state exp(-H/T)/Z of a Hermitian matrix; T > 0.
Matrix gibbs_state(const Matrix& hamiltonian, double temperature);

// Matrix exponential by Pade scaling and squaring.
Matrix expm(const Matrix& m);

// Bose occupation 1/(exp(nu/T)-1); 0 when T == 0.
double bose_occupation(double nu, double temperature);

}  // namespace qrabi

#include "qrabi/rabi_exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qrabi/linalg.hpp"

namespace qrabi {

void RabiParams::validate() const {
    if (!std::isfinite(omega) || !std::isfinite(omega0) || !std::isfinite(beta)) {
        throw DomainError("Rabi parameters must be finite");
    }
    if (!(omega > 0.0)) throw DomainError("omega must be positive");
    if (omega0 < 0.0) throw DomainError("omega0 must be non-negative");
}

bool Spectrum::all_converged() const {
    return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

Operator build_h_rabi(const RabiParams& p, SpaceDims dims) {
    p.validate();
    const Operator a = annihilation(dims);
    const Operator x = a + a.adjoint();
    Operator h = Complex(0.5 * p.omega0) * qubit_op(Pauli::z, dims);
    h += Complex(p.omega) * number(dims);
    h += Complex(p.beta * p.omega) * (x * qubit_op(Pauli::x, dims));
    return h;
}

namespace {

struct Eigenpair {
    double energy;
    Vector state;
    int parity;
};

// Deterministic phase: largest-magnitude component real and positive.
void fix_phase(Vector& v) {
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    const Complex c = v(k);
    v *= std::conj(c) / std::abs(c);
}

std::vector<Eigenpair> solve_block(const Matrix& h, const std::vector<int>& idx, int parity, int total) {
    const int n = static_cast<int>(idx.size());
    std::vector<Eigenpair> out;
    if (n == 0) return out;
    Matrix sub(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sub(i, j) = h(idx[i], idx[j]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sub);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed");
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        Vector v = Vector::Zero(total);
        for (int i = 0; i < n; ++i) v(idx[i]) = es.eigenvectors()(i, k);
        fix_phase(v);
        out.push_back({es.eigenvalues()(k), std::move(v), parity});
    }
    return out;
}

Spectrum solve(const Operator& h, int keep) {
    const Matrix& m = h.matrix();
    const double scale = std::max(1.0, max_abs(m));
    if (hermiticity_defect(m) > 1e-10 * scale) throw DomainError("diagonalize: Hamiltonian is not Hermitian");
    const int dim = h.dim();
    if (keep < 1 || keep > dim) throw DomainError("diagonalize: keep must be in [1, " + std::to_string(dim) + "]");

    const Matrix pi = parity(h.dims()).matrix();
    const bool parity_symmetric = max_abs(m * pi - pi * m) <= 1e-10 * scale;

    std::vector<Eigenpair> pairs;
    if (parity_symmetric) {
        std::vector<int> even, odd;
        for (int i = 0; i < dim; ++i) (pi(i, i).real() > 0 ? even : odd).push_back(i);
        pairs = solve_block(m, even, +1, dim);
        auto more = solve_block(m, odd, -1, dim);
        pairs.insert(pairs.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    } else {
        std::vector<int> all(dim);
        std::iota(all.begin(), all.end(), 0);
        pairs = solve_block(m, all, 0, dim);
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Eigenpair& a, const Eigenpair& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.parity > b.parity;
    });

    Spectrum s;
    for (int k = 0; k < keep; ++k) {
        s.energies.push_back(pairs[k].energy);
        s.states.emplace_back(h.dims(), std::move(pairs[k].state));
        s.parity.push_back(pairs[k].parity);
    }
    return s;
}

}  // namespace

Spectrum diagonalize(const Operator& h, int keep) { return solve(h, keep); }

Spectrum diagonalize(const HamiltonianBuilder& build, SpaceDims dims, int keep, double energy_scale) {
    Spectrum s = solve(build(dims), keep);
    const Spectrum bigger = solve(build(SpaceDims(dims.n_cut() + kConvergenceStep)), keep);
    s.convergence_checked = true;
    for (int k = 0; k < keep; ++k) {
        const double shift = std::abs(s.energies[k] - bigger.energies[k]);
        s.shift.push_back(shift);
        s.converged.push_back(shift < kConvergenceTol * energy_scale);
    }
    return s;
}

Spectrum rabi_spectrum(const RabiParams& p, SpaceDims dims, int keep) {
    return diagonalize([&p](SpaceDims d) { return build_h_rabi(p, d); }, dims, keep, p.omega);
}

GroundState ground_state(const RabiParams& p, SpaceDims dims) {
    Spectrum s = diagonalize(build_h_rabi(p, dims), 1);
    return {s.energies[0], s.states[0]};
}

}  // namespace qrabi

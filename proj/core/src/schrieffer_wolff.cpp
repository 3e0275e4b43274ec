#include "qrabi/schrieffer_wolff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qrabi/linalg.hpp"
#include "qrabi/pairing.hpp"

namespace qrabi {

namespace {

void require_off_resonance(const RabiParams& p) {
    p.validate();
    if (std::abs(p.omega - p.omega0) < 1e-12 * p.omega) {
        throw DomainError("Schrieffer-Wolff transformation undefined at resonance omega = omega0");
    }
}

}  // namespace

double sw_dispersive_coefficient(const RabiParams& p) {
    require_off_resonance(p);
    const double w2 = p.omega * p.omega;
    return p.omega0 * w2 * p.beta * p.beta / (p.omega0 * p.omega0 - w2);
}

double sw_constant_shift(const RabiParams& p) {
    require_off_resonance(p);
    const double w = p.omega, w0 = p.omega0;
    return -0.5 * w * w * p.beta * p.beta * (1.0 / (w + w0) + 1.0 / (w - w0));
}

Operator build_h_sw(const RabiParams& p, SpaceDims dims) {
    const double chi = sw_dispersive_coefficient(p);
    const Operator a = annihilation(dims);
    const Operator x = a + a.adjoint();
    const Operator sz = qubit_op(Pauli::z, dims);
    Operator h = Complex(0.5 * p.omega0) * sz;
    h += Complex(p.omega) * number(dims);
    h += Complex(chi) * (sz * (x * x));
    return h;
}

Operator sw_generator(const RabiParams& p, SpaceDims dims) {
    require_off_resonance(p);
    const Operator a = annihilation(dims);
    const Operator ad = a.adjoint();
    const Operator sp = qubit_op(Pauli::plus, dims);
    const Operator sm = qubit_op(Pauli::minus, dims);
    const double bw = p.beta * p.omega;
    // Counter-rotating pair (a^dag s+, a s-) carries 1/(w0 + w), co-rotating pair 1/(w0 - w).
    Operator s = Complex(-bw / (p.omega0 - p.omega)) * (a * sp - ad * sm);
    s += Complex(-bw / (p.omega0 + p.omega)) * (ad * sp - a * sm);
    return s;
}

SwEnergyTable sw_energies(const RabiParams& p, int n_levels) {
    require_off_resonance(p);
    if (n_levels < 1) throw DomainError("n_levels must be positive");
    const double w = p.omega, w0 = p.omega0, b2 = p.beta * p.beta;
    const double x = 4.0 * w * w0 * b2 / (w * w - w0 * w0);
    if (!(1.0 - x > 0.0) || !(1.0 + x > 0.0)) {
        throw DomainError("SW frequencies complex: |4 w w0 b^2/(w^2 - w0^2)| >= 1");
    }
    SwEnergyTable t;
    t.omega_tilde_plus = w * std::sqrt(1.0 - x);
    t.omega_tilde_minus = w * std::sqrt(1.0 + x);
    t.simplified_plus = w - 2.0 * w0 * b2;
    t.simplified_minus = w + 2.0 * w0 * b2;
    for (int N = 0; N < n_levels; ++N) {
        for (Branch br : {Branch::minus, Branch::plus}) {
            const double s = sign(br);
            const double wt = br == Branch::plus ? t.omega_tilde_plus : t.omega_tilde_minus;
            const double ws = br == Branch::plus ? t.simplified_plus : t.simplified_minus;
            SwEnergy e{N, br, s * 0.5 * w0 + wt * (N + 0.5), s * 0.5 * w0 + ws * (N + 0.5),
                       adiabatic_energy(p, N, br, EnergyMode::truncated)};
            t.alignment_defect = std::max(t.alignment_defect, std::abs(e.simplified - 0.5 * w - e.adiabatic));
            t.rows.push_back(e);
        }
    }
    return t;
}

double FidelityTable::mean_adiabatic() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.f_adiabatic;
    return s / static_cast<double>(rows.size());
}

double FidelityTable::mean_sw() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.f_sw;
    return s / static_cast<double>(rows.size());
}

namespace {

Matrix stack(const std::vector<Ket>& kets) {
    Matrix m(kets.front().dim(), static_cast<Eigen::Index>(kets.size()));
    for (std::size_t i = 0; i < kets.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = kets[i].vector();
    return m;
}

struct SwStates {
    Operator h_sw;
    std::vector<Ket> rotated;
    std::vector<double> energies;
};

SwStates rotated_sw_states(const RabiParams& p, int count, SpaceDims dims) {
    Operator h = build_h_sw(p, dims);
    const Spectrum s = diagonalize(h, count);
    const Matrix u = expm(sw_generator(p, dims).matrix());
    std::vector<Ket> out;
    out.reserve(s.states.size());
    for (const Ket& k : s.states) out.emplace_back(dims, u * k.vector());
    return {std::move(h), std::move(out), s.energies};
}

}  // namespace

FidelityTable fidelity_comparison(const RabiParams& p, int n_states, SpaceDims dims) {
    require_off_resonance(p);
    if (n_states < 1 || 2 * n_states > dims.total_dim()) throw DomainError("n_states out of range for n_cut");
    const Spectrum exact = diagonalize(build_h_rabi(p, dims), n_states);

    const int levels = std::max(2, std::min({n_states, max_levels(p.beta), dims.n_cut()}));
    const DressedBasis basis = build_basis(p, levels, dims, EnergyMode::exact_overlap);
    const int n_sw = std::min(2 * n_states, dims.total_dim());
    const SwStates sw = rotated_sw_states(p, n_sw, dims);
    const double shift = sw_constant_shift(p);

    const Matrix ex = stack(exact.states);
    const Pairing pa = max_weight_matching(overlap_weights(ex, basis.embedding));
    const Pairing ps = max_weight_matching(overlap_weights(ex, stack(sw.rotated)));

    FidelityTable t;
    t.params = p;
    t.conflicts_adiabatic = pa.conflicts;
    t.conflicts_sw = ps.conflicts;
    for (int i = 0; i < n_states; ++i) {
        const int col = pa.target[i];
        const Branch br = col < levels ? Branch::plus : Branch::minus;
        const int N = col < levels ? col : col - levels;
        t.rows.push_back({i, exact.energies[i], std::clamp(pa.weight[i], 0.0, 1.0), N, br,
                          std::clamp(ps.weight[i], 0.0, 1.0), ps.target[i], basis.energy(N, br),
                          sw.energies[ps.target[i]] + shift});
    }
    return t;
}

SwResult sw_analysis(const RabiParams& p, int n_states, SpaceDims dims) {
    SwStates sw = rotated_sw_states(p, n_states, dims);
    return {std::move(sw.h_sw), sw_energies(p, n_states), std::move(sw.rotated), fidelity_comparison(p, n_states, dims)};
}

}  // namespace qrabi

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qrabi/linalg.hpp"
#include "qrabi/rabi_exact.hpp"
#include "qrabi/schrieffer_wolff.hpp"

using namespace qrabi;

namespace {

const SpaceDims kDims(40);

// max |e^{-S} H e^{S} - H_SW - c| over joint states with Fock index < 5 (10 levels)
double conjugation_residual(const RabiParams& p) {
    const Matrix u = expm(sw_generator(p, kDims).matrix());
    const Matrix h = u.adjoint() * build_h_rabi(p, kDims).matrix() * u;
    Matrix r = h - build_h_sw(p, kDims).matrix();
    r -= sw_constant_shift(p) * Matrix::Identity(kDims.total_dim(), kDims.total_dim());
    double m = 0.0;
    for (Qubit qi : {Qubit::excited, Qubit::ground})
        for (Qubit qj : {Qubit::excited, Qubit::ground})
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) m = std::max(m, std::abs(r(kDims.index(qi, i), kDims.index(qj, j))));
    return m;
}

}  // namespace

TEST(HSw, DecoupledLimit) {
    const RabiParams p{1.0, 0.15, 0.0};
    EXPECT_LT(max_abs(build_h_sw(p, kDims).matrix() - build_h_rabi(p, kDims).matrix()), 1e-15);
    EXPECT_EQ(max_abs(sw_generator(p, kDims).matrix()), 0.0);
    EXPECT_THROW(build_h_sw({1.0, 1.0, 0.1}, kDims), DomainError);
}

TEST(HSw, EigenvaluesMatchClosedForm) {
    const RabiParams p{1.0, 0.15, 0.1};
    const Spectrum s = diagonalize(build_h_sw(p, kDims), 12);
    const SwEnergyTable t = sw_energies(p, 6);
    std::vector<double> closed;
    for (const auto& r : t.rows) closed.push_back(r.closed_form - 0.5 * p.omega);
    std::sort(closed.begin(), closed.end());
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(s.energies[k], closed[k], 1e-8) << "k = " << k;
}

TEST(SwEnergies, DecoupledAndHarmonic) {
    const SwEnergyTable t0 = sw_energies({1.0, 0.3, 0.0}, 4);
    for (const auto& r : t0.rows) EXPECT_NEAR(r.closed_form, sign(r.branch) * 0.15 + (r.N + 0.5), 1e-15);

    const SwEnergyTable t = sw_energies({1.0, 0.15, 0.1}, 6);
    const auto level = [&](int N, Branch b) {
        for (const auto& r : t.rows)
            if (r.N == N && r.branch == b) return r.closed_form;
        return std::nan("");
    };
    for (int N = 0; N < 6; ++N) {
        EXPECT_NEAR(level(N, Branch::plus) - level(0, Branch::plus), N * t.omega_tilde_plus, 1e-13);
        EXPECT_NEAR(level(N, Branch::minus) - level(0, Branch::minus), N * t.omega_tilde_minus, 1e-13);
    }
    EXPECT_THROW(sw_energies({1.0, 0.15, 3.0}, 2), DomainError);
}

TEST(SwEnergies, SimplifiedFrequencies) {
    for (double w0 : {0.02, 0.05, 0.1}) {
        for (double beta : {0.05, 0.1}) {
            const SwEnergyTable t = sw_energies({1.0, w0, beta}, 3);
            const double b2 = beta * beta;
            const double bound = 4.0 * (w0 * w0 * b2 + b2 * b2);
            EXPECT_LT(std::abs(t.omega_tilde_plus - t.simplified_plus), bound);
            EXPECT_LT(std::abs(t.omega_tilde_minus - t.simplified_minus), bound);
        }
    }
}

TEST(SwEnergies, SimplifiedMatchesAdiabaticExactly) {
    for (double w0 : {0.05, 0.15, 0.3}) {
        for (double beta : {0.05, 0.1, 0.2}) {
            EXPECT_LT(sw_energies({1.0, w0, beta}, 6).alignment_defect, 1e-13);
        }
    }
}

TEST(SwGenerator, AntiHermitianAndCancelsCoupling) {
    const RabiParams p{1.0, 0.15, 0.1};
    const Operator s = sw_generator(p, kDims);
    EXPECT_EQ(max_abs(s.matrix() + s.matrix().adjoint()), 0.0);
    const Operator h0 = build_h_rabi({1.0, 0.15, 0.0}, kDims);
    const Operator v = build_h_rabi(p, kDims) - h0;
    EXPECT_LT(max_abs((commutator(h0, s) + v).matrix()), 1e-13);
    EXPECT_THROW(sw_generator({1.0, 1.0, 0.1}, kDims), DomainError);
}

TEST(SwGenerator, ConjugationResidualIsThirdOrder) {
    const double r1 = conjugation_residual({1.0, 0.15, 0.1});
    const double r2 = conjugation_residual({1.0, 0.15, 0.05});
    EXPECT_LT(r1, 2.5e-3);
    EXPECT_GT(r1 / r2, 6.0);
    EXPECT_LT(r1 / r2, 10.0);
    EXPECT_NEAR(sw_constant_shift({1.0, 0.15, 0.1}), -0.5 * 0.01 * (1.0 / 1.15 + 1.0 / 0.85), 1e-15);
}

TEST(Fidelity, DecoupledIsOne) {
    const FidelityTable t = fidelity_comparison({1.0, 0.15, 0.0}, 6, kDims);
    ASSERT_EQ(t.rows.size(), 6u);
    for (const auto& r : t.rows) {
        EXPECT_NEAR(r.f_adiabatic, 1.0, 1e-12);
        EXPECT_NEAR(r.f_sw, 1.0, 1e-12);
    }
}

TEST(Fidelity, MeansMatchIndependentOracle) {
    struct Ref {
        double w0, f_ad, f_sw;
    };
    // numpy / scipy, n_cut = 60, Hungarian pairing (tests/oracles/reference_values.py)
    for (const Ref& ref : {Ref{0.05, 0.999930201674969, 0.999999917095041}, Ref{0.15, 0.999338427065736, 0.999998891922025},
                           Ref{3.0, 0.946654447802611, 0.999744991413556}}) {
        const FidelityTable t = fidelity_comparison({1.0, ref.w0, 0.1}, 6, kDims);
        EXPECT_NEAR(t.mean_adiabatic(), ref.f_ad, 1e-9) << "w0 = " << ref.w0;
        EXPECT_NEAR(t.mean_sw(), ref.f_sw, 1e-9) << "w0 = " << ref.w0;
        for (const auto& r : t.rows) {
            EXPECT_GE(r.f_adiabatic, 0.0);
            EXPECT_LE(r.f_adiabatic, 1.0 + 1e-12);
            EXPECT_GE(r.f_sw, 0.0);
            EXPECT_LE(r.f_sw, 1.0 + 1e-12);
        }
    }
}

TEST(Fidelity, AdiabaticBreaksDownAboveQubitResonance) {
    const FidelityTable t = fidelity_comparison({1.0, 3.0, 0.1}, 6, kDims);
    EXPECT_GT(t.mean_sw(), t.mean_adiabatic());
    EXPECT_LT(t.mean_adiabatic(), 0.96);
    EXPECT_GT(t.mean_sw(), 0.999);
}

TEST(Fidelity, PairedEnergies) {
    const RabiParams p{1.0, 0.15, 0.1};
    const FidelityTable t = fidelity_comparison(p, 6, kDims);
    for (const auto& r : t.rows) {
        EXPECT_NEAR(r.e_adiabatic, r.energy, 5e-3);
        EXPECT_NEAR(r.e_sw, r.energy, 5e-3);
    }
    EXPECT_EQ(t.conflicts_adiabatic, 0);
}

TEST(SwAnalysis, Bundle) {
    const SwResult r = sw_analysis({1.0, 0.15, 0.1}, 4, kDims);
    EXPECT_EQ(r.fidelities.rows.size(), 4u);
    EXPECT_FALSE(r.eigenvectors.empty());
    for (const Ket& k : r.eigenvectors) EXPECT_NEAR(k.norm(), 1.0, 1e-10);
    EXPECT_LT(r.energies.alignment_defect, 1e-13);
}

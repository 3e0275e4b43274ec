#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qrabi/adiabatic.hpp"
#include "qrabi/dynamics.hpp"
#include "qrabi/linalg.hpp"
#include "qrabi/lindblad.hpp"
#include "qrabi/rabi_exact.hpp"
#include "support.hpp"

using namespace qrabi;

namespace {

const SpaceDims kDims(40);
const RabiParams kFig{1.0, 0.3, 0.1};
const double kGamma = 3.0 * 0.3 * 0.01 / 5.0;  // 3 w0 b^2 / 5

RateFunctions fig_rates(double gamma_f = kGamma / 3.0) {
    return RateFunctions::flat(kGamma, kGamma / 6.0 - 0.04 * kGamma, gamma_f);
}

Matrix dressed_projector(const DressedBasis& b, int N, Branch br) {
    Matrix m = Matrix::Zero(b.size(), b.size());
    m(b.index(N, br), b.index(N, br)) = 1.0;
    return m;
}

}  // namespace

TEST(Dissipator, LadderExamples) {
    const SpaceDims d(6);
    const Operator a = annihilation(d);
    const DensityMatrix vac = DensityMatrix::pure(basis_ket(Qubit::ground, 0, d));
    EXPECT_EQ(max_abs(dissipator_apply(a, vac)), 0.0);
    const DensityMatrix one = DensityMatrix::pure(basis_ket(Qubit::ground, 1, d));
    Matrix want = Matrix::Zero(12, 12);
    want(d.index(Qubit::ground, 0), d.index(Qubit::ground, 0)) = 1.0;
    want(d.index(Qubit::ground, 1), d.index(Qubit::ground, 1)) = -1.0;
    EXPECT_LT(max_abs(dissipator_apply(a, one) - want), 1e-15);

    std::mt19937_64 rng(21);
    for (int k = 0; k < 5; ++k) {
        const Matrix op = test::random_matrix(rng, 12);
        const Matrix rho = test::random_density(rng, 12);
        EXPECT_LT(std::abs(dissipator_apply(op, rho).trace()), 1e-12);
    }
    EXPECT_THROW(dissipator_apply(Matrix::Identity(3, 3), Matrix::Identity(4, 4)), DimensionError);
}

TEST(Liouvillian, ColumnStackingMatchesApply) {
    const DressedBasis b = build_basis(kFig, 3, kDims, EnergyMode::truncated);
    const MasterEquation me = build_driven_rotating(b, fig_rates(), {kGamma / 2.0, b.omega_minus});
    const Matrix l = liouvillian(me);
    std::mt19937_64 rng(22);
    const Matrix rho = test::random_density(rng, b.size());
    const Vector v = Eigen::Map<const Vector>(rho.data(), rho.size());
    const Vector lv = l * v;
    const Matrix direct = me.apply(rho);
    EXPECT_LT((lv - Eigen::Map<const Vector>(direct.data(), direct.size())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Sme, DecoupledVacuumIsStationary) {
    const RabiParams p{1.0, 0.15, 0.0};
    const MasterEquation me = build_sme(p, RateFunctions::flat(1e-3, 1e-3), SpaceDims(10));
    const Matrix rho = test::projector(basis_ket(Qubit::ground, 0, SpaceDims(10)).vector());
    EXPECT_LT(max_abs(me.apply(rho)), 1e-16);
}

TEST(Sme, ExactGroundStateIsNotStationary) {
    const RabiParams p{1.0, 0.15, 0.1};
    const double Gamma = 1e-3;
    const MasterEquation me = build_sme(p, RateFunctions::flat(Gamma, Gamma), kDims);
    EXPECT_DOUBLE_EQ(me.jumps[0].rate, Gamma);
    const Matrix rho = test::projector(ground_state(p, kDims).state.vector());
    const Matrix rdot = me.apply(rho);
    EXPECT_GT(max_abs(rdot), 1e-4 * Gamma);
    EXPECT_LT(std::abs(rdot.trace()), 1e-12 * max_abs(rdot));

    SmeRates o;
    o.kappa = 2e-3;
    EXPECT_DOUBLE_EQ(build_sme(p, RateFunctions::flat(Gamma, Gamma), kDims, o).jumps[0].rate, 2e-3);
}

TEST(DmeZeroT, DressedGroundStateIsStationary) {
    const DressedBasis b = build_basis(kFig, 6, kDims, EnergyMode::truncated);
    const MasterEquation me = build_dme_zero_t(b, fig_rates());
    const Matrix rho = dressed_projector(b, 0, Branch::minus);
    EXPECT_LT(max_abs(me.apply(rho)), 1e-12 * kGamma);
}

TEST(DmeZeroT, UpperGroundDecaysAtKappa) {
    const DressedBasis b = build_basis(kFig, 6, kDims, EnergyMode::truncated);
    const RateFunctions r = fig_rates();
    const MasterEquation me = build_dme_zero_t(b, r);
    const Matrix rdot = me.apply(dressed_projector(b, 0, Branch::plus));
    const double kappa = cross_rate(kFig, r, 0);
    EXPECT_NEAR(kappa, kGamma / 6.0, 1e-18);
    const int m0 = b.index(0, Branch::minus), p0 = b.index(0, Branch::plus);
    EXPECT_NEAR(rdot(m0, m0).real(), kappa, 1e-18);
    EXPECT_NEAR(rdot(p0, p0).real(), -kappa, 1e-18);
}

TEST(DmeZeroT, DecoupledLimitDampsLaddersIndependently) {
    const DressedBasis b = build_basis({1.0, 0.3, 0.0}, 4, SpaceDims(10), EnergyMode::truncated);
    const MasterEquation me = build_dme_zero_t(b, RateFunctions::flat(1e-3, 0.0));
    for (const auto& j : me.jumps) {
        if (j.label.rfind("cross", 0) == 0) {
            EXPECT_EQ(j.rate, 0.0);
        }
    }
    const Ladders l = build_ladders(b, Representation::dressed);
    std::mt19937_64 rng(23);
    const Matrix rho = test::random_density(rng, b.size());
    const Matrix h = build_h_ad(b, Representation::dressed).matrix();
    const Matrix want = Complex(0.0, -1.0) * (h * rho - rho * h) + 1e-3 * dissipator_apply(l.a_plus.matrix(), rho) +
                        1e-3 * dissipator_apply(l.a_minus.matrix(), rho);
    EXPECT_LT(max_abs(me.apply(rho) - want), 1e-16);
}

TEST(DmeFiniteT, LowTemperatureRecoversZeroT) {
    const DressedBasis b = build_basis(kFig, 4, kDims, EnergyMode::truncated);
    RateFunctions r = fig_rates();
    const MasterEquation zero = build_dme_zero_t(b, r);
    r.temperature = 1e-3;
    const MasterEquation warm = build_dme_finite_t(b, r);
    EXPECT_LT(max_abs(liouvillian(zero) - liouvillian(warm)), 1e-15);
    r.temperature = 0.0;
    EXPECT_THROW(build_dme_finite_t(b, r), DomainError);
}

TEST(DmeFiniteT, GibbsStateIsStationaryAndBalanced) {
    const DressedBasis b = build_basis(kFig, 6, kDims, EnergyMode::truncated);
    for (double T : {0.1, 0.5}) {
        RateFunctions r = fig_rates();
        r.temperature = T;
        const MasterEquation me = build_dme_finite_t(b, r);
        const Matrix g = gibbs_state(build_h_ad(b, Representation::dressed).matrix(), T);
        EXPECT_LT(max_abs(me.apply(g)), 1e-9) << "T = " << T;
        ASSERT_EQ(me.thermal_pairs.size(), 2u + 6u);
        for (const auto& pr : me.thermal_pairs) {
            const double ratio = me.jumps[pr.up].rate / me.jumps[pr.down].rate;
            EXPECT_NEAR(ratio, std::exp(-pr.frequency / T), 1e-15 * std::max(1.0, ratio));
        }
    }
}

TEST(Sz, StructureAndDecoupledLimit) {
    const DressedBasis b = build_basis(kFig, 6, kDims, EnergyMode::truncated);
    const Operator sz = build_sz(b, Representation::dressed);
    EXPECT_EQ(sz.hermiticity_defect(), 0.0);
    for (int N = 0; N < 6; ++N) {
        EXPECT_NEAR(sz(b.index(N, Branch::plus), b.index(N, Branch::plus)).real(), overlap(N, 0.1), 1e-15);
        EXPECT_NEAR(sz(b.index(N, Branch::plus), b.index(N, Branch::plus)).real(),
                    std::exp(-0.02) * test::laguerre_sum(N, 0.04), 1e-14);
        for (int M = 0; M < 6; ++M) EXPECT_EQ(sz(b.index(N, Branch::plus), b.index(M, Branch::minus)), Complex(0.0));
    }
    const SpaceDims d(10);
    const DressedBasis b0 = build_basis({1.0, 0.3, 0.0}, 4, d);
    const Matrix p = b0.embedding * b0.embedding.adjoint();
    EXPECT_LT(max_abs(build_sz(b0).matrix() - p * qubit_op(Pauli::z, d).matrix() * p), 1e-14);
}

TEST(Dephasing, DoubleCommutatorEqualsJumpForm) {
    const DressedBasis b = build_basis(kFig, 6, kDims, EnergyMode::truncated);
    const Operator sz = build_sz(b, Representation::dressed);
    const MasterEquation base = build_dme_zero_t(b, fig_rates());
    const double gf = kGamma / 3.0;
    const MasterEquation with = add_dephasing(base, gf, sz);
    MasterEquation as_jump = base;
    as_jump.jumps.push_back({gf, sz, "sz", 0.0});
    std::mt19937_64 rng(24);
    for (int k = 0; k < 5; ++k) {
        const Matrix rho = test::random_density(rng, b.size());
        EXPECT_LT(max_abs(with.apply(rho) - as_jump.apply(rho)), 1e-12);
    }
    EXPECT_FALSE(add_dephasing(base, 0.0, sz).dephasing.has_value());
    EXPECT_THROW(add_dephasing(base, -1.0, sz), DomainError);
}

TEST(Dephasing, PopulationAndCoherenceRates) {
    const DressedBasis b = build_basis(kFig, 6, kDims, EnergyMode::truncated);
    const Operator sz = build_sz(b, Representation::dressed);
    MasterEquation me(Operator(b.coords(), Matrix::Zero(b.size(), b.size())), Representation::dressed);
    const double gf = 1.0;
    me = add_dephasing(me, gf, sz);
    for (int N = 0; N <= 2; ++N) {
        for (int M = 0; M <= 2; ++M) {
            // coherence within one ladder decays at (gf/2)(L_N - L_M)^2
            Matrix rho = Matrix::Zero(b.size(), b.size());
            const int i = b.index(N, Branch::minus), j = b.index(M, Branch::minus);
            rho(i, j) = 1.0;
            const double rate = -me.apply(rho)(i, j).real();
            const double pref = std::pow(overlap(N, 0.1) - overlap(M, 0.1), 2);
            EXPECT_NEAR(rate, 0.5 * gf * pref, 1e-15);
            EXPECT_LE(pref, 6.4e-3);
            EXPECT_LE(pref, std::pow(4.0 * 0.01 * std::abs(N - M), 2) * 1.1);
            // cross-ladder coherence decays at (gf/2)(L_N + L_M)^2, well above the in-ladder rate
            Matrix x = Matrix::Zero(b.size(), b.size());
            const int k = b.index(N, Branch::plus);
            x(k, j) = 1.0;
            const double xr = -me.apply(x)(k, j).real();
            EXPECT_NEAR(xr, 0.5 * gf * std::pow(overlap(N, 0.1) + overlap(M, 0.1), 2), 1e-14);
            EXPECT_GT(xr, 1.5 * gf);
        }
    }
}

TEST(DrivenRotating, UndrivenRelaxesToDressedGround) {
    const DressedBasis b = build_basis(kFig, 6, kDims, EnergyMode::truncated);
    const MasterEquation me = build_driven_rotating(b, fig_rates(0.0), {0.0, b.omega_minus});
    const SteadyState ss = steady_state_nullspace(me);
    EXPECT_GT(ss.rho(b.index(0, Branch::minus), b.index(0, Branch::minus)).real(), 1.0 - 1e-10);
}

TEST(DrivenRotating, CoherentStateIsStationaryInMinusSector) {
    const DressedBasis b = build_basis(kFig, 20, kDims, EnergyMode::truncated);
    const double amp = 0.7 * kGamma / 2.0;
    for (double detuning : {0.0, 0.3 * kGamma}) {
        const Pump pump{amp, b.omega_minus - detuning};
        const MasterEquation me = build_driven_rotating(b, fig_rates(0.0), pump);
        const Complex alpha = coherent_amplitude(amp, kGamma, detuning);
        EXPECT_NEAR(std::abs(alpha - amp / Complex(-detuning, kGamma / 2.0)), 0.0, 1e-15);
        const Matrix rho = test::projector(coherent_dressed(b, alpha, Branch::minus));
        EXPECT_LT(max_abs(me.apply(rho)), 1e-8 * kGamma);
    }
}

TEST(DrivenRotating, ResonantExcitationNumber) {
    const DressedBasis b = build_basis(kFig, 16, kDims, EnergyMode::truncated);
    const MasterEquation me = build_driven_rotating(b, fig_rates(0.0), {kGamma / 2.0, b.omega_minus});
    const SteadyState ss = steady_state_nullspace(me);
    const ObservableRecord o = observables(ss.rho, b, Representation::dressed);
    EXPECT_NEAR(o.n_minus, 1.0, 1e-6);
    EXPECT_LT(o.sector_plus, 1e-6);
}

TEST(DrivenRotating, MatchesIndependentSteadyState) {
    // numpy null_space of the same generator built from its definition (tests/oracles/reference_values.py)
    const DressedBasis b = build_basis(kFig, 14, kDims, EnergyMode::truncated);
    const MasterEquation me = build_driven_rotating(b, fig_rates(), {kGamma / 2.0, b.omega_minus});
    EXPECT_NEAR(observables(steady_state_nullspace(me).rho, b, Representation::dressed).n_total, 0.999507770023123, 1e-9);
    const MasterEquation clean = build_driven_rotating(b, fig_rates(0.0), {kGamma / 2.0, b.omega_minus});
    EXPECT_NEAR(observables(steady_state_nullspace(clean).rho, b, Representation::dressed).n_total, 0.999999999236759,
                1e-9);
}

TEST(DrivenRotating, RejectsUnsupportedRates) {
    const DressedBasis b = build_basis(kFig, 6, kDims, EnergyMode::truncated);
    RateFunctions r = fig_rates();
    r.Gamma = [](double w) { return 1e-3 * w; };
    EXPECT_THROW(build_driven_rotating(b, r, {1e-4, b.omega_minus}), DomainError);
    RateFunctions warm = fig_rates();
    warm.temperature = 0.1;
    EXPECT_THROW(build_driven_rotating(b, warm, {1e-4, b.omega_minus}), DomainError);
}

TEST(SpectroscopyTone, ZeroAmplitudeIsIdentity) {
    const DressedBasis b = build_basis(kFig, 6, kDims, EnergyMode::truncated);
    const MasterEquation me = build_driven_rotating(b, fig_rates(), {kGamma / 2.0, b.omega_minus});
    const MasterEquation same = add_spectroscopy_tone(me, b, {0.0, 0.29}, b.omega_minus);
    EXPECT_FALSE(same.time_dependent());
    EXPECT_EQ(max_abs(liouvillian(me) - liouvillian(same)), 0.0);
    EXPECT_THROW(add_spectroscopy_tone(me, b, {1e-4, 0.29}, b.omega_minus + 0.01), DomainError);
}

TEST(SpectroscopyTone, ResonantTwoLevelRabiRate) {
    const DressedBasis b = build_basis(kFig, 2, kDims, EnergyMode::truncated);
    const double amp = 2e-4;
    const MasterEquation me0 = build_driven_rotating(b, RateFunctions::flat(0.0, 0.0), {0.0, b.omega_minus});
    const MasterEquation me = add_spectroscopy_tone(me0, b, {amp, b.omega_tilde[0]}, b.omega_minus);
    const double rabi = 4.0 * kFig.beta * amp;
    const double period = 2.0 * M_PI / rabi;
    IntegratorControls c;
    c.dt = 0.2;
    c.store_interval = period / 8.0;
    const auto obs = dressed_observables(b);
    const Trajectory tr = evolve(me, dressed_projector(b, 0, Branch::minus), period / 2.0, c, obs);
    const auto& plus = tr.series("sector_plus");
    // counter-rotating tone gives O(2 b amp / w~_0) ripple
    const double tol = 4.0 * kFig.beta * amp / b.omega_tilde[0];
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double want = std::pow(std::sin(0.5 * rabi * tr.times[i]), 2);
        EXPECT_NEAR(plus[i], want, tol) << "t = " << tr.times[i];
    }
    EXPECT_GT(plus.back(), 1.0 - tol);
}

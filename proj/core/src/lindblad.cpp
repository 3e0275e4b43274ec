#include "qrabi/lindblad.hpp"

#include <cmath>
#include <string>

#include "qrabi/linalg.hpp"

namespace qrabi {

namespace {

void require_square(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw DimensionError(std::string(what) + ": dimension mismatch");
    }
}

Matrix dressed_zero(const DressedBasis& b) { return Matrix::Zero(b.size(), b.size()); }

}  // namespace

// ----- MasterEquation -----

void MasterEquation::validate() const {
    const double hs = std::max(1.0, max_abs(hamiltonian.matrix()));
    if (hamiltonian.hermiticity_defect() > 1e-10 * hs) throw DomainError("master equation: Hamiltonian not Hermitian");
    for (const auto& j : jumps) {
        if (!(j.rate >= 0.0) || !std::isfinite(j.rate)) throw DomainError("master equation: negative rate on " + j.label);
        if (!(j.op.dims() == dims())) throw DimensionError("master equation: jump " + j.label + " has wrong dimension");
    }
    if (dephasing) {
        if (!(dephasing->rate >= 0.0)) throw DomainError("master equation: negative dephasing rate");
        if (!(dephasing->op.dims() == dims())) throw DimensionError("master equation: S_z has wrong dimension");
        if (dephasing->op.hermiticity_defect() > 1e-10) throw DomainError("master equation: S_z not Hermitian");
    }
    for (const auto& d : drive) {
        if (!(d.op.dims() == dims())) throw DimensionError("master equation: drive tone has wrong dimension");
    }
}

Matrix MasterEquation::hamiltonian_at(double t) const {
    Matrix h = hamiltonian.matrix();
    for (const auto& d : drive) {
        const Complex c = d.amplitude * std::exp(Complex(0.0, -d.frequency * t));
        h += c * d.op.matrix() + std::conj(c) * d.op.matrix().adjoint();
    }
    return h;
}

Matrix MasterEquation::apply(const Matrix& rho, double t) const {
    if (rho.rows() != dim() || rho.cols() != dim()) throw DimensionError("apply: state has wrong dimension");
    const Complex mi(0.0, -1.0);
    const Matrix h = hamiltonian_at(t);
    Matrix out = mi * (h * rho - rho * h);
    for (const auto& j : jumps) {
        if (j.rate != 0.0) out += j.rate * dissipator_apply(j.op.matrix(), rho);
    }
    if (dephasing && dephasing->rate != 0.0) {
        const Matrix& s = dephasing->op.matrix();
        const Matrix c = s * rho - rho * s;
        out -= 0.5 * dephasing->rate * (s * c - c * s);
    }
    return out;
}

Matrix dissipator_apply(const Matrix& op, const Matrix& rho) {
    require_square(op, rho, "dissipator_apply");
    const Matrix od = op.adjoint();
    const Matrix n = od * op;
    return op * rho * od - 0.5 * (n * rho + rho * n);
}

Matrix dissipator_apply(const Operator& op, const DensityMatrix& rho) {
    if (!(op.dims() == rho.dims())) throw DimensionError("dissipator_apply: dimension mismatch");
    return dissipator_apply(op.matrix(), rho.matrix());
}

Matrix liouvillian(const MasterEquation& me, double t) {
    const int d = me.dim();
    const Matrix id = Matrix::Identity(d, d);
    auto kron = [](const Matrix& a, const Matrix& b) {
        Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return k;
    };
    const Matrix h = me.hamiltonian_at(t);
    Matrix l = Complex(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
    auto add_dissipator = [&](double rate, const Matrix& op) {
        if (rate == 0.0) return;
        const Matrix n = op.adjoint() * op;
        l += rate * (kron(op.conjugate(), op) - 0.5 * kron(id, n) - 0.5 * kron(n.transpose(), id));
    };
    for (const auto& j : me.jumps) add_dissipator(j.rate, j.op.matrix());
    if (me.dephasing) add_dissipator(me.dephasing->rate, me.dephasing->op.matrix());
    return l;
}

// ----- generators -----

double cross_rate(const RabiParams& p, const RateFunctions& rates, int N) {
    const double w = dressed_transition_frequency(p, N);
    return rates.qubit(w) + 4.0 * p.beta * p.beta * rates.oscillator(w);
}

Complex coherent_amplitude(double omega_p_amplitude, double Gamma, double detuning) {
    return omega_p_amplitude / Complex(-detuning, 0.5 * Gamma);
}

MasterEquation build_sme(const RabiParams& p, const RateFunctions& rates, SpaceDims dims, const SmeRates& overrides) {
    rates.validate();
    if (rates.temperature != 0.0) throw DomainError("the standard master equation is defined at zero temperature");
    const double kappa = overrides.kappa.value_or(rates.oscillator(p.omega));
    const double gamma = overrides.gamma.value_or(rates.qubit(p.omega0));
    if (!(kappa >= 0.0) || !(gamma >= 0.0)) throw DomainError("SME rates must be non-negative");
    MasterEquation me(build_h_rabi(p, dims), Representation::joint);
    me.jumps.push_back({kappa, annihilation(dims), "a", p.omega});
    me.jumps.push_back({gamma, qubit_op(Pauli::minus, dims), "sigma_minus", p.omega0});
    me.validate();
    return me;
}

namespace {

Operator dressed_op(const DressedBasis& b, Matrix m) { return Operator(b.coords(), std::move(m)); }

Matrix cross_jump(const DressedBasis& b, int N) {
    Matrix m = dressed_zero(b);
    m(b.index(N, Branch::minus), b.index(N, Branch::plus)) = 1.0;
    return m;
}

}  // namespace

MasterEquation build_dme_zero_t(const DressedBasis& b, const RateFunctions& rates) {
    rates.validate();
    const Ladders l = build_ladders(b, Representation::dressed);
    MasterEquation me(build_h_ad(b, Representation::dressed), Representation::dressed);
    me.jumps.push_back({rates.oscillator(b.omega_plus), l.a_plus, "a_plus", b.omega_plus});
    me.jumps.push_back({rates.oscillator(b.omega_minus), l.a_minus, "a_minus", b.omega_minus});
    for (int N = 0; N < b.n_levels; ++N) {
        me.jumps.push_back({cross_rate(b.params, rates, N), dressed_op(b, cross_jump(b, N)),
                            "cross_" + std::to_string(N), b.omega_tilde[N]});
    }
    me.validate();
    return me;
}

MasterEquation build_dme_finite_t(const DressedBasis& b, const RateFunctions& rates) {
    rates.validate();
    const double T = rates.temperature;
    if (!(T > 0.0)) throw DomainError("finite-temperature generator needs temperature > 0");
    const MasterEquation zero = build_dme_zero_t(b, rates);
    MasterEquation me(zero.hamiltonian, Representation::dressed);
    for (const auto& j : zero.jumps) {
        const double nbar = bose_occupation(j.frequency, T);
        const std::size_t down = me.jumps.size();
        me.jumps.push_back({j.rate * (nbar + 1.0), j.op, j.label + "_down", j.frequency});
        me.jumps.push_back({j.rate * nbar, j.op.adjoint(), j.label + "_up", -j.frequency});
        me.thermal_pairs.push_back({down, down + 1, j.frequency});
    }
    me.validate();
    return me;
}

Operator build_sz(const DressedBasis& b, Representation rep) {
    Matrix m = dressed_zero(b);
    for (int N = 0; N < b.n_levels; ++N) {
        const double o = overlap(N, b.params.beta);
        m(b.index(N, Branch::plus), b.index(N, Branch::plus)) = o;
        m(b.index(N, Branch::minus), b.index(N, Branch::minus)) = -o;
    }
    if (rep == Representation::dressed) return dressed_op(b, std::move(m));
    return b.lift(dressed_op(b, std::move(m)));
}

MasterEquation add_dephasing(MasterEquation me, double gamma_f, const Operator& sz) {
    if (!(gamma_f >= 0.0) || !std::isfinite(gamma_f)) throw DomainError("gamma_f must be non-negative");
    if (!(sz.dims() == me.dims())) throw DimensionError("add_dephasing: S_z dimension mismatch");
    if (me.dephasing) throw DomainError("add_dephasing: dephasing term already present");
    if (gamma_f > 0.0) me.dephasing = DephasingTerm{gamma_f, sz};
    me.validate();
    return me;
}

MasterEquation build_driven_rotating(const DressedBasis& b, const RateFunctions& rates, const Pump& pump) {
    rates.validate();
    if (rates.temperature != 0.0) throw DomainError("driven rotating-frame generator is defined at zero temperature");
    if (!(pump.amplitude >= 0.0) || !std::isfinite(pump.amplitude)) throw DomainError("pump amplitude must be non-negative");
    if (!(pump.frequency > 0.0)) throw DomainError("pump frequency must be positive");

    const double Gamma = rates.oscillator(b.omega_minus);
    if (std::abs(rates.oscillator(b.omega_plus) - Gamma) > 1e-12 * std::max(Gamma, 1e-300)) {
        throw DomainError("rotating-frame generator assumes Gamma(omega_+) = Gamma(omega_-)");
    }
    const double kappa = cross_rate(b.params, rates, 0);
    for (int N = 1; N < b.n_levels; ++N) {
        if (std::abs(cross_rate(b.params, rates, N) - kappa) > 1e-12 * std::max(kappa, 1e-300)) {
            throw DomainError("rotating-frame generator assumes an N-independent kappa");
        }
    }

    const Ladders l = build_ladders(b, Representation::dressed);
    const Matrix& ap = l.a_plus.matrix();
    const Matrix& am = l.a_minus.matrix();
    const double off = 0.5 * b.params.omega0 * (1.0 - 2.0 * b.params.beta * b.params.beta);
    const double dp = b.omega_plus - pump.frequency;
    const double dm = b.omega_minus - pump.frequency;
    Matrix h = dp * ap.adjoint() * ap + off * l.proj_plus.matrix() + dm * am.adjoint() * am - off * l.proj_minus.matrix();
    h += pump.amplitude * (ap + ap.adjoint() + am + am.adjoint());

    MasterEquation me(dressed_op(b, std::move(h)), Representation::dressed);
    me.frame_frequency = pump.frequency;
    me.jumps.push_back({Gamma, l.a_plus, "a_plus", b.omega_plus});
    me.jumps.push_back({Gamma, l.a_minus, "a_minus", b.omega_minus});
    for (int N = 0; N < b.n_levels; ++N) {
        me.jumps.push_back({kappa, dressed_op(b, cross_jump(b, N)), "cross_" + std::to_string(N), b.omega_tilde[N]});
    }
    if (rates.gamma_f > 0.0) me.dephasing = DephasingTerm{rates.gamma_f, build_sz(b, Representation::dressed)};
    me.notes.push_back("rotating frame at omega_p; sector offsets (w0/2)(1-2b^2)(1_+ - 1_-) retained");
    me.validate();
    return me;
}

MasterEquation add_spectroscopy_tone(MasterEquation me, const DressedBasis& b, const SpectroscopyTone& tone,
                                     double pump_frequency) {
    if (me.rep != Representation::dressed || !(me.dims() == b.coords())) {
        throw DimensionError("spectroscopy tone needs a dressed-coordinate generator of the same basis");
    }
    if (me.frame_frequency == 0.0 || std::abs(me.frame_frequency - pump_frequency) > 1e-15 * pump_frequency) {
        throw DomainError("spectroscopy tone requires the generator in the frame rotating at the pump frequency");
    }
    if (!(tone.amplitude >= 0.0) || !(tone.frequency > 0.0)) throw DomainError("invalid spectroscopy tone");
    if (tone.amplitude == 0.0) return me;
    Matrix x = dressed_zero(b);
    for (int N = 0; N < b.n_levels; ++N) x += cross_jump(b, N);
    Matrix xh = x + x.adjoint();
    // Omega_s (S + S^dag)(e^{i ws t} + e^{-i ws t}), cross-ladder part of S is -2b X.
    me.drive.push_back({dressed_op(b, std::move(xh)), Complex(-2.0 * b.params.beta * tone.amplitude, 0.0),
                        tone.frequency, "spectroscopy_cross"});
    me.notes.push_back("intra-ladder spectroscopy tones dropped");
    me.validate();
    return me;
}

}  // namespace qrabi

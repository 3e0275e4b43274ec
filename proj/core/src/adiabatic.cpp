#include "qrabi/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qrabi/linalg.hpp"

namespace qrabi {

const char* to_string(Branch b) { return b == Branch::plus ? "+" : "-"; }

double laguerre(int n, double x) {
    if (n < 0) throw DomainError("laguerre: degree must be non-negative");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double overlap(int N, double beta) {
    if (N < 0) throw DomainError("overlap: N must be non-negative");
    const double b2 = beta * beta;
    return std::exp(-2.0 * b2) * laguerre(N, 4.0 * b2);
}

double ladder_frequency(const RabiParams& p, Branch b) {
    return p.omega - sign(b) * 2.0 * p.omega0 * p.beta * p.beta;
}

double dressed_transition_frequency(const RabiParams& p, int N) {
    const double b2 = p.beta * p.beta;
    return p.omega0 * (1.0 - 2.0 * b2 - 4.0 * N * b2);
}

double adiabatic_energy(const RabiParams& p, int N, Branch b, EnergyMode mode) {
    const double b2 = p.beta * p.beta;
    const double s = sign(b);
    if (mode == EnergyMode::exact_overlap) {
        return p.omega * (N - b2) + s * 0.5 * p.omega0 * overlap(N, p.beta);
    }
    return N * ladder_frequency(p, b) + s * 0.5 * p.omega0 * (1.0 - 2.0 * b2);
}

int max_levels(double beta) {
    if (beta == 0.0) return std::numeric_limits<int>::max();
    return static_cast<int>(std::floor(1.0 / (4.0 * beta * beta) * (1.0 + 1e-12)));
}

int recommended_levels(double beta) {
    if (beta == 0.0) return std::numeric_limits<int>::max();
    return static_cast<int>(std::floor(0.25 / (4.0 * beta * beta) * (1.0 + 1e-12)));
}

// ----- DressedBasis -----

int DressedBasis::index(int N, Branch b) const {
    if (N < 0 || N >= n_levels) throw DimensionError("dressed level N out of range");
    return b == Branch::plus ? N : n_levels + N;
}

const Ket& DressedBasis::state(int N, Branch b) const {
    index(N, b);
    return b == Branch::plus ? states_plus[N] : states_minus[N];
}

double DressedBasis::energy(int N, Branch b) const {
    index(N, b);
    return b == Branch::plus ? energies_plus[N] : energies_minus[N];
}

Matrix DressedBasis::lift_matrix(const Matrix& dressed) const {
    if (dressed.rows() != size() || dressed.cols() != size()) throw DimensionError("lift: expected dressed-coordinate matrix");
    return embedding * dressed * embedding.adjoint();
}

Vector DressedBasis::lift_vector(const Vector& dressed) const {
    if (dressed.size() != size()) throw DimensionError("lift: expected dressed-coordinate vector");
    return embedding * dressed;
}

Operator DressedBasis::lift(const Operator& dressed) const {
    return Operator(dims, lift_matrix(dressed.matrix()));
}

Operator DressedBasis::compress(const Operator& joint) const {
    if (!(joint.dims() == dims)) throw DimensionError("compress: joint operator has different n_cut");
    return Operator(coords(), embedding.adjoint() * joint.matrix() * embedding);
}

double DressedBasis::leakage(const Matrix& rho_joint) const {
    if (rho_joint.rows() != dims.total_dim()) throw DimensionError("leakage: expected joint-space state");
    const Complex kept = (embedding.adjoint() * rho_joint * embedding).trace();
    return std::max(0.0, rho_joint.trace().real() - kept.real());
}

DressedBasis build_basis(const RabiParams& p, int n_levels, SpaceDims dims, EnergyMode mode) {
    p.validate();
    if (n_levels < 2) throw DomainError("n_levels must be >= 2");
    if (n_levels > dims.n_cut()) throw DomainError("n_levels exceeds the Fock truncation n_cut");
    const int n_max = max_levels(p.beta);
    if (n_levels > n_max) {
        std::ostringstream os;
        os << "n_levels = " << n_levels << " exceeds n_max = floor(1/(2 beta)^2) = " << n_max
           << " at beta = " << p.beta << "; dressed ladders are not ordered beyond this";
        throw DomainError(os.str());
    }

    DressedBasis b;
    b.params = p;
    b.n_levels = n_levels;
    b.dims = dims;
    b.mode = mode;
    b.omega_plus = ladder_frequency(p, Branch::plus);
    b.omega_minus = ladder_frequency(p, Branch::minus);
    if (n_levels > recommended_levels(p.beta)) {
        std::ostringstream os;
        os << "n_levels = " << n_levels << " above floor(0.25/(2 beta)^2) = " << recommended_levels(p.beta)
           << "; O(N beta^2) corrections grow on the top rungs";
        b.warnings.push_back(os.str());
    }

    const int n = dims.n_cut();
    const DisplacementResult dp = displacement_checked(Complex(-p.beta, 0.0), dims);
    const DisplacementResult dm = displacement_checked(Complex(p.beta, 0.0), dims);
    b.displacement_defect = std::max(dp.truncation_defect, dm.truncation_defect);
    if (dp.warning || dm.warning) {
        b.warnings.push_back("displacement truncation defect " + std::to_string(b.displacement_defect) +
                             " exceeds 1e-8; raise n_cut");
    }
    // |N_+> = D(-b)|N>, |N_-> = D(b)|N>
    const Matrix d_plus = dp.op.matrix().topLeftCorner(n, n);
    const Matrix d_minus = dm.op.matrix().topLeftCorner(n, n);
    const double s = 1.0 / std::sqrt(2.0);

    b.embedding = Matrix::Zero(dims.total_dim(), 2 * n_levels);
    for (int N = 0; N < n_levels; ++N) {
        // |+,N_+> = (|e>+|g>)/sqrt2 (x) |N_+>, |-,N_-> = (|e>-|g>)/sqrt2 (x) |N_->
        Vector plus_part(dims.total_dim()), minus_part(dims.total_dim());
        plus_part << s * d_plus.col(N), s * d_plus.col(N);
        minus_part << s * d_minus.col(N), -s * d_minus.col(N);
        Vector psi_p = s * (plus_part + minus_part);
        Vector psi_m = s * (plus_part - minus_part);
        b.embedding.col(N) = psi_p;
        b.embedding.col(n_levels + N) = psi_m;
        b.states_plus.emplace_back(dims, std::move(psi_p));
        b.states_minus.emplace_back(dims, std::move(psi_m));
        b.energies_plus.push_back(adiabatic_energy(p, N, Branch::plus, mode));
        b.energies_minus.push_back(adiabatic_energy(p, N, Branch::minus, mode));
        b.omega_tilde.push_back(dressed_transition_frequency(p, N));
    }

    const Matrix gram = b.embedding.adjoint() * b.embedding;
    b.orthonormality_defect = max_abs(gram - Matrix::Identity(2 * n_levels, 2 * n_levels));
    if (b.orthonormality_defect > 1e-9) {
        throw NumericError("dressed basis not orthonormal (defect " + std::to_string(b.orthonormality_defect) +
                           "); raise n_cut");
    }
    for (int N = 0; N < n_levels; ++N) {
        const double gap = b.energies_plus[N] - b.energies_minus[N];
        if (p.omega0 > 0.0 && !(gap > 0.0)) {
            throw DomainError("E_N^+ <= E_N^- at N = " + std::to_string(N) + "; reduce n_levels");
        }
    }
    if (p.omega0 == 0.0) b.warnings.push_back("degenerate qubit (omega0 = 0): E_N^+ = E_N^-");
    return b;
}

// ----- ladders and effective Hamiltonian -----

namespace {

Operator in_rep(const DressedBasis& b, Matrix dressed, Representation rep) {
    if (rep == Representation::dressed) return Operator(b.coords(), std::move(dressed));
    return Operator(b.dims, b.lift_matrix(dressed));
}

Matrix ladder_block(const DressedBasis& b, Branch br) {
    Matrix m = Matrix::Zero(b.size(), b.size());
    for (int N = 0; N + 1 < b.n_levels; ++N) m(b.index(N, br), b.index(N + 1, br)) = std::sqrt(N + 1.0);
    return m;
}

Matrix projector(const DressedBasis& b, Branch br) {
    Matrix m = Matrix::Zero(b.size(), b.size());
    for (int N = 0; N < b.n_levels; ++N) m(b.index(N, br), b.index(N, br)) = 1.0;
    return m;
}

Matrix cross_lowering(const DressedBasis& b) {
    Matrix m = Matrix::Zero(b.size(), b.size());
    for (int N = 0; N < b.n_levels; ++N) m(b.index(N, Branch::minus), b.index(N, Branch::plus)) = 1.0;
    return m;
}

}  // namespace

Ladders build_ladders(const DressedBasis& b, Representation rep) {
    return {in_rep(b, ladder_block(b, Branch::plus), rep), in_rep(b, ladder_block(b, Branch::minus), rep),
            in_rep(b, projector(b, Branch::plus), rep), in_rep(b, projector(b, Branch::minus), rep)};
}

Operator build_h_ad(const DressedBasis& b, Representation rep) {
    const Matrix ap = ladder_block(b, Branch::plus);
    const Matrix am = ladder_block(b, Branch::minus);
    const double off = 0.5 * b.params.omega0 * (1.0 - 2.0 * b.params.beta * b.params.beta);
    Matrix h = b.omega_plus * ap.adjoint() * ap + off * projector(b, Branch::plus) +
               b.omega_minus * am.adjoint() * am - off * projector(b, Branch::minus);
    return in_rep(b, std::move(h), rep);
}

// ----- matrix elements -----

ElementTable dressed_matrix_elements(const DressedBasis& b, Coupling which) {
    std::vector<MatrixElement> entries;
    const int n = b.n_levels;
    const double beta = b.params.beta;
    for (Branch s : {Branch::plus, Branch::minus}) {
        for (int N = 0; N < n; ++N) {
            for (Branch t : {Branch::plus, Branch::minus}) {
                for (int M = 0; M < n; ++M) {
                    double v = 0.0;
                    if (which == Coupling::position) {
                        if (s == t && N == M - 1) v = std::sqrt(static_cast<double>(M));
                        if (s == t && N == M + 1) v = std::sqrt(static_cast<double>(N));
                        if (s != t && N == M) v = -2.0 * beta;
                    } else {
                        if (s != t && N == M) v = 1.0;
                    }
                    if (v != 0.0) entries.push_back({N, s, M, t, v});
                }
            }
        }
    }
    Matrix m = Matrix::Zero(b.size(), b.size());
    for (const auto& e : entries) m(b.index(e.N, e.row), b.index(e.M, e.col)) = e.value;
    return {which, std::move(entries), Operator(b.coords(), m), Operator(b.dims, b.lift_matrix(m))};
}

Matrix numeric_matrix_elements(const DressedBasis& b, const Operator& joint_op) {
    return b.compress(joint_op).matrix();
}

Operator dressed_lowering_S(const DressedBasis& b, Representation rep) {
    Matrix s = ladder_block(b, Branch::minus) + ladder_block(b, Branch::plus) - 2.0 * b.params.beta * cross_lowering(b);
    return in_rep(b, std::move(s), rep);
}

Operator lowering_from_elements(const DressedBasis& b, const Matrix& elements) {
    if (elements.rows() != b.size() || elements.cols() != b.size()) throw DimensionError("element matrix shape");
    std::vector<double> e(b.size());
    for (int N = 0; N < b.n_levels; ++N) {
        e[b.index(N, Branch::plus)] = adiabatic_energy(b.params, N, Branch::plus, EnergyMode::truncated);
        e[b.index(N, Branch::minus)] = adiabatic_energy(b.params, N, Branch::minus, EnergyMode::truncated);
    }
    Matrix s = Matrix::Zero(b.size(), b.size());
    for (int j = 0; j < b.size(); ++j)
        for (int k = 0; k < b.size(); ++k)
            if (e[k] > e[j]) s(j, k) = elements(j, k);
    return Operator(b.coords(), std::move(s));
}

Vector coherent_dressed(const DressedBasis& b, Complex alpha, Branch branch) {
    Vector v = Vector::Zero(b.size());
    Complex c = std::exp(-0.5 * std::norm(alpha));
    for (int N = 0; N < b.n_levels; ++N) {
        v(b.index(N, branch)) = c;
        c *= alpha / std::sqrt(N + 1.0);
    }
    return v / v.norm();
}

// ----- validity -----

ValidityReport validity_report(const RabiParams& p, int n_levels, const RateFunctions& rates) {
    p.validate();
    ValidityReport r;
    r.quasi_degenerate = p.quasi_degenerate();
    r.quasi_degenerate_margin = 0.3 * p.omega - p.omega0;
    r.beta_ok = p.coupling_ok();
    r.beta_margin = 0.2 - std::abs(p.beta);
    r.n_max = max_levels(p.beta);
    r.levels_ok = n_levels <= r.n_max;

    if (!r.quasi_degenerate) r.warnings.push_back("omega0 above 0.3 omega: qubit not quasi-degenerate");
    if (!r.beta_ok) r.warnings.push_back("|beta| above 0.2: O(beta^4) terms not negligible");
    if (!r.levels_ok) r.warnings.push_back("n_levels above n_max = floor(1/(2 beta)^2)");
    if (p.omega0 == 0.0) r.warnings.push_back("degenerate qubit (omega0 = 0): dressed pairs degenerate, no resolved transitions");

    std::vector<double> freqs{ladder_frequency(p, Branch::plus), ladder_frequency(p, Branch::minus)};
    std::vector<double> rate_values{rates.oscillator(freqs[0]), rates.oscillator(freqs[1]), rates.gamma_f};
    const double b2 = p.beta * p.beta;
    for (int N = 0; N < n_levels; ++N) {
        const double w = dressed_transition_frequency(p, N);
        freqs.push_back(w);
        rate_values.push_back(rates.qubit(w) + 4.0 * b2 * rates.oscillator(w));
    }
    std::sort(freqs.begin(), freqs.end());
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < freqs.size(); ++i) {
        const double g = freqs[i] - freqs[i - 1];
        if (g > 1e-12 * p.omega) min_gap = std::min(min_gap, g);
    }
    r.max_rate = *std::max_element(rate_values.begin(), rate_values.end());
    if (std::isfinite(min_gap)) {
        r.min_spacing = min_gap;
        r.secular_margin = r.max_rate > 0.0 ? min_gap / r.max_rate : std::numeric_limits<double>::max();
        r.secular_ok = r.max_rate <= min_gap / 5.0;
        if (!r.secular_ok) r.warnings.push_back("rates not small against transition-frequency spacings (secular condition)");
    } else {
        r.warnings.push_back("no distinct transition frequencies; secular condition not applicable");
    }
    return r;
}

}  // namespace qrabi

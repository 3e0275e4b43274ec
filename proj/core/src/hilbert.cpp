#include "qrabi/hilbert.hpp"

#include <cmath>
#include <string>

#include "qrabi/linalg.hpp"

namespace qrabi {

namespace {

void require_same(const SpaceDims& a, const SpaceDims& b, const char* what) {
    if (!(a == b)) {
        throw DimensionError(std::string(what) + ": dimension mismatch (n_cut " +
                             std::to_string(a.n_cut()) + " vs " + std::to_string(b.n_cut()) + ")");
    }
}

void require_shape(const SpaceDims& dims, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (rows != dims.total_dim() || cols != dims.total_dim()) {
        throw DimensionError(std::string(what) + ": expected " + std::to_string(dims.total_dim()) +
                             "x" + std::to_string(dims.total_dim()) + " matrix, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
}

}  // namespace

SpaceDims::SpaceDims(int n_cut) : n_cut_(n_cut) {
    if (n_cut < 2) throw DimensionError("n_cut must be >= 2, got " + std::to_string(n_cut));
}

int SpaceDims::index(Qubit q, int n) const {
    if (n < 0 || n >= n_cut_) throw DimensionError("Fock index " + std::to_string(n) + " out of range");
    return static_cast<int>(q) * n_cut_ + n;
}

// ----- Operator -----

Operator::Operator(SpaceDims dims, Matrix entries) : dims_(dims), m_(std::move(entries)) {
    require_shape(dims_, m_.rows(), m_.cols(), "Operator");
}

Operator Operator::adjoint() const { return Operator(dims_, m_.adjoint()); }

double Operator::hermiticity_defect() const { return qrabi::hermiticity_defect(m_); }

Operator& Operator::operator+=(const Operator& o) {
    require_same(dims_, o.dims_, "operator+");
    m_ += o.m_;
    return *this;
}

Operator& Operator::operator-=(const Operator& o) {
    require_same(dims_, o.dims_, "operator-");
    m_ -= o.m_;
    return *this;
}

Operator& Operator::operator*=(Complex s) {
    m_ *= s;
    return *this;
}

Operator operator+(Operator a, const Operator& b) { return a += b; }
Operator operator-(Operator a, const Operator& b) { return a -= b; }
Operator operator*(Complex s, Operator a) { return a *= s; }
Operator operator*(Operator a, Complex s) { return a *= s; }

Operator operator*(const Operator& a, const Operator& b) {
    require_same(a.dims(), b.dims(), "operator*");
    return Operator(a.dims(), a.matrix() * b.matrix());
}

// ----- Ket -----

Ket::Ket(SpaceDims dims, Vector amplitudes) : dims_(dims), v_(std::move(amplitudes)) {
    if (v_.size() != dims_.total_dim()) {
        throw DimensionError("Ket: expected length " + std::to_string(dims_.total_dim()) + ", got " +
                             std::to_string(v_.size()));
    }
}

Ket Ket::normalized() const {
    const double n = v_.norm();
    if (n == 0.0) throw DomainError("cannot normalize the zero vector");
    return Ket(dims_, v_ / n);
}

Complex Ket::inner(const Ket& other) const {
    require_same(dims_, other.dims_, "inner");
    return v_.dot(other.v_);
}

Ket operator*(const Operator& op, const Ket& k) {
    require_same(op.dims(), k.dims(), "apply");
    return Ket(k.dims(), op.matrix() * k.vector());
}

// ----- DensityMatrix -----

DensityDefects density_defects(const Matrix& rho) {
    DensityDefects d;
    d.hermiticity = hermiticity_defect(rho);
    d.trace = std::abs(rho.trace() - Complex(1.0, 0.0));
    d.min_eigenvalue = min_eigenvalue(hermitian_part(rho));
    return d;
}

DensityMatrix::DensityMatrix(SpaceDims dims, Matrix entries) : dims_(dims), m_(std::move(entries)) {
    require_shape(dims_, m_.rows(), m_.cols(), "DensityMatrix");
    const DensityDefects d = density_defects(m_);
    if (d.hermiticity > kHermTol) {
        throw DomainError("DensityMatrix: not Hermitian (defect " + std::to_string(d.hermiticity) + ")");
    }
    if (d.trace > kTraceTol) {
        throw DomainError("DensityMatrix: trace differs from 1 by " + std::to_string(d.trace));
    }
    if (d.min_eigenvalue < kEigTol) {
        throw DomainError("DensityMatrix: negative eigenvalue " + std::to_string(d.min_eigenvalue));
    }
}

DensityMatrix DensityMatrix::pure(const Ket& k) {
    const Vector v = k.vector() / k.norm();
    return DensityMatrix(k.dims(), v * v.adjoint());
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

// ----- standard operators -----

Eigen::Matrix2cd pauli_matrix(Pauli which) {
    using namespace std::complex_literals;
    Eigen::Matrix2cd p = Eigen::Matrix2cd::Zero();
    switch (which) {
        case Pauli::x: p << 0.0, 1.0, 1.0, 0.0; break;
        case Pauli::y: p << 0.0, -1i, 1i, 0.0; break;
        case Pauli::z: p << 1.0, 0.0, 0.0, -1.0; break;
        case Pauli::plus: p(0, 1) = 1.0; break;
        case Pauli::minus: p(1, 0) = 1.0; break;
        case Pauli::identity: p = Eigen::Matrix2cd::Identity(); break;
    }
    return p;
}

Matrix oscillator_annihilation(int n_cut) {
    Matrix a = Matrix::Zero(n_cut, n_cut);
    for (int n = 1; n < n_cut; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Operator tensor(const Eigen::Matrix2cd& qubit, const Matrix& oscillator) {
    if (oscillator.rows() != oscillator.cols()) throw DimensionError("tensor: oscillator factor not square");
    const int n = static_cast<int>(oscillator.rows());
    SpaceDims dims(n);
    Matrix m = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (qubit(i, j) != 0.0) m.block(i * n, j * n, n, n) = qubit(i, j) * oscillator;
        }
    }
    return Operator(dims, std::move(m));
}

Operator identity(SpaceDims dims) { return Operator(dims, Matrix::Identity(dims.total_dim(), dims.total_dim())); }

Operator annihilation(SpaceDims dims) {
    return tensor(pauli_matrix(Pauli::identity), oscillator_annihilation(dims.n_cut()));
}

Operator creation(SpaceDims dims) { return annihilation(dims).adjoint(); }

Operator number(SpaceDims dims) {
    Matrix n = Matrix::Zero(dims.n_cut(), dims.n_cut());
    for (int k = 0; k < dims.n_cut(); ++k) n(k, k) = static_cast<double>(k);
    return tensor(pauli_matrix(Pauli::identity), n);
}

Operator qubit_op(Pauli which, SpaceDims dims) {
    return tensor(pauli_matrix(which), Matrix::Identity(dims.n_cut(), dims.n_cut()));
}

Operator parity(SpaceDims dims) {
    Matrix p = Matrix::Zero(dims.n_cut(), dims.n_cut());
    for (int k = 0; k < dims.n_cut(); ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return tensor(pauli_matrix(Pauli::z), p);
}

Operator dagger(const Operator& op) { return op.adjoint(); }

Operator commutator(const Operator& a, const Operator& b) {
    require_same(a.dims(), b.dims(), "commutator");
    return Operator(a.dims(), a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

Ket basis_ket(Qubit q, int n, SpaceDims dims) {
    Vector v = Vector::Zero(dims.total_dim());
    v(dims.index(q, n)) = 1.0;
    return Ket(dims, std::move(v));
}

namespace {

Eigen::Vector2cd sigma_x_spinor(int m) {
    if (m != 1 && m != -1) throw DomainError("sigma_x label must be +1 or -1");
    const double s = 1.0 / std::sqrt(2.0);
    return Eigen::Vector2cd(s, m * s);
}

Vector kron_spinor(const Eigen::Vector2cd& q, const Vector& osc) {
    const Eigen::Index n = osc.size();
    Vector v(2 * n);
    v.head(n) = q(0) * osc;
    v.tail(n) = q(1) * osc;
    return v;
}

}  // namespace

Ket sigma_x_ket(int m, int n, SpaceDims dims) {
    if (n < 0 || n >= dims.n_cut()) throw DimensionError("Fock index out of range");
    Vector osc = Vector::Zero(dims.n_cut());
    osc(n) = 1.0;
    return Ket(dims, kron_spinor(sigma_x_spinor(m), osc));
}

// ----- displacements -----

Matrix oscillator_displacement(Complex alpha, int n_cut) {
    if (n_cut < 1) throw DimensionError("n_cut must be positive");
    const Matrix a = oscillator_annihilation(n_cut);
    const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
    return expm(gen);
}

Operator displacement(Complex alpha, SpaceDims dims) {
    return tensor(pauli_matrix(Pauli::identity), oscillator_displacement(alpha, dims.n_cut()));
}

DisplacementResult displacement_checked(Complex alpha, SpaceDims dims) {
    const int n = dims.n_cut();
    const Matrix d = oscillator_displacement(alpha, n);
    const Matrix d2 = oscillator_displacement(alpha, 2 * n);
    const int h = n / 2;
    const double defect = max_abs(d.topLeftCorner(h, h) - d2.topLeftCorner(h, h));
    return {tensor(pauli_matrix(Pauli::identity), d), defect, defect > kDisplacementDefectTol};
}

Vector displaced_fock_oscillator(int N, int m, double beta, int n_cut) {
    if (N < 0 || N >= n_cut) throw DimensionError("displaced_fock: N out of range");
    if (m != 1 && m != -1) throw DomainError("displaced_fock: m must be +1 or -1");
    return oscillator_displacement(Complex(-m * beta, 0.0), n_cut).col(N);
}

Ket displaced_fock(int N, int m, double beta, SpaceDims dims) {
    return Ket(dims, kron_spinor(sigma_x_spinor(m), displaced_fock_oscillator(N, m, beta, dims.n_cut())));
}

// ----- expectation values -----

Expectation expectation(const Matrix& op, const Matrix& rho) {
    if (op.rows() != rho.rows() || op.cols() != rho.cols()) throw DimensionError("expectation: shape mismatch");
    const Complex v = op.transpose().cwiseProduct(rho).sum();
    return {v.real(), v.imag()};
}

Expectation expectation(const Operator& op, const DensityMatrix& rho) {
    require_same(op.dims(), rho.dims(), "expectation");
    return expectation(op.matrix(), rho.matrix());
}

Expectation expectation(const Operator& op, const Ket& k) {
    require_same(op.dims(), k.dims(), "expectation");
    const Complex v = k.vector().dot(op.matrix() * k.vector()) / k.vector().squaredNorm();
    return {v.real(), v.imag()};
}

}  // namespace qrabi

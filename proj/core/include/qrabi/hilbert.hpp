#pragma once

#include <complex>
#include <Eigen/Dense>

#include "qrabi/errors.hpp"

namespace qrabi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Qubit basis: excited first. Joint index = qubit * n_cut + n.
enum class Qubit { excited = 0, ground = 1 };

enum class Pauli { x, y, z, plus, minus, identity };

class SpaceDims {
public:
    explicit SpaceDims(int n_cut);

    int n_cut() const { return n_cut_; }
    int total_dim() const { return 2 * n_cut_; }
    int index(Qubit q, int n) const;

    bool operator==(const SpaceDims& other) const = default;

private:
    int n_cut_;
};

class Operator {
public:
    Operator(SpaceDims dims, Matrix entries);

    const SpaceDims& dims() const { return dims_; }
    const Matrix& matrix() const { return m_; }
    int dim() const { return dims_.total_dim(); }
    Complex operator()(int i, int j) const { return m_(i, j); }

    Operator adjoint() const;
    double hermiticity_defect() const;

    Operator& operator+=(const Operator& o);
    Operator& operator-=(const Operator& o);
    Operator& operator*=(Complex s);

private:
    SpaceDims dims_;
    Matrix m_;
};

Operator operator+(Operator a, const Operator& b);
Operator operator-(Operator a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex s, Operator a);
Operator operator*(Operator a, Complex s);

class Ket {
public:
    Ket(SpaceDims dims, Vector amplitudes);

    const SpaceDims& dims() const { return dims_; }
    const Vector& vector() const { return v_; }
    int dim() const { return dims_.total_dim(); }
    double norm() const { return v_.norm(); }

    Ket normalized() const;
    Complex inner(const Ket& other) const;  // <this|other>

private:
    SpaceDims dims_;
    Vector v_;
};

Ket operator*(const Operator& op, const Ket& k);

struct DensityDefects {
    double hermiticity = 0.0;
    double trace = 0.0;
    double min_eigenvalue = 0.0;
};

DensityDefects density_defects(const Matrix& rho);

class DensityMatrix {
public:
    static constexpr double kHermTol = 1e-10;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kEigTol = -1e-8;

    // Throws DomainError when any invariant fails.
    DensityMatrix(SpaceDims dims, Matrix entries);

    static DensityMatrix pure(const Ket& k);

    const SpaceDims& dims() const { return dims_; }
    const Matrix& matrix() const { return m_; }
    int dim() const { return dims_.total_dim(); }
    double purity() const;

private:
    SpaceDims dims_;
    Matrix m_;
};

// ----- standard operators -----

Operator identity(SpaceDims dims);
Operator annihilation(SpaceDims dims);
Operator creation(SpaceDims dims);
Operator number(SpaceDims dims);
Operator qubit_op(Pauli which, SpaceDims dims);
Operator parity(SpaceDims dims);  // sigma_z * exp(i pi a^dag a)

Eigen::Matrix2cd pauli_matrix(Pauli which);
Matrix oscillator_annihilation(int n_cut);

Operator tensor(const Eigen::Matrix2cd& qubit, const Matrix& oscillator);
Operator dagger(const Operator& op);
Operator commutator(const Operator& a, const Operator& b);

Ket basis_ket(Qubit q, int n, SpaceDims dims);
Ket sigma_x_ket(int m, int n, SpaceDims dims);  // |m> (x) |n>, m = +1 or -1

// ----- displacements -----

// exp(alpha a^dag - conj(alpha) a) on an n_cut-level oscillator.
Matrix oscillator_displacement(Complex alpha, int n_cut);

struct DisplacementResult {
    Operator op;
    double truncation_defect;  // lowest n_cut/2 block vs the same block at 2 n_cut
    bool warning;
};

inline constexpr double kDisplacementDefectTol = 1e-8;

Operator displacement(Complex alpha, SpaceDims dims);
DisplacementResult displacement_checked(Complex alpha, SpaceDims dims);

// D(-m beta)|N> on the oscillator alone.
Vector displaced_fock_oscillator(int N, int m, double beta, int n_cut);
// |m> (x) D(-m beta)|N> in the joint space.
Ket displaced_fock(int N, int m, double beta, SpaceDims dims);

// ----- expectation values -----

inline constexpr double kImaginaryDefectTol = 1e-9;

struct Expectation {
    double value;
    double imaginary;
    bool defect() const { return std::abs(imaginary) > kImaginaryDefectTol; }
};

Expectation expectation(const Operator& op, const DensityMatrix& rho);
Expectation expectation(const Operator& op, const Ket& k);
Expectation expectation(const Matrix& op, const Matrix& rho);

}  // namespace qrabi

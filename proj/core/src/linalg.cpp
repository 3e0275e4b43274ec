#include "qrabi/linalg.hpp"

#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

namespace qrabi {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : std::sqrt(m.cwiseAbs2().maxCoeff()); }

double frobenius_norm(const Matrix& m) { return m.norm(); }

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double trace_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

double hermiticity_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double min_eigenvalue(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a - b), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double state_fidelity(const Vector& psi, const Matrix& rho) {
    return std::abs(psi.dot(rho * psi)) / psi.squaredNorm();
}

double clip_to_density(Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho));
    RealVector ev = es.eigenvalues();
    double clipped = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0.0) {
            clipped += -ev(i);
            ev(i) = 0.0;
        }
    }
    const double tr = ev.sum();
    rho = es.eigenvectors() * (ev / tr).cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    return clipped;
}

Matrix gibbs_state(const Matrix& hamiltonian, double temperature) {
    if (!(temperature > 0.0)) throw DomainError("gibbs_state: temperature must be positive");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(hamiltonian));
    const RealVector& e = es.eigenvalues();
    const double e0 = e.minCoeff();
    RealVector w = (-(e.array() - e0) / temperature).exp().matrix();
    w /= w.sum();
    return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Matrix expm(const Matrix& m) { return m.exp(); }

double bose_occupation(double nu, double temperature) {
    if (temperature < 0.0) throw DomainError("temperature must be non-negative");
    if (temperature == 0.0) return 0.0;
    if (!(nu > 0.0)) throw DomainError("thermal occupation needs a positive transition frequency");
    return 1.0 / std::expm1(nu / temperature);
}

}  // namespace qrabi

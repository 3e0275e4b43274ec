#pragma once

#include <cmath>
#include <random>

#include "qrabi/hilbert.hpp"
#include "qrabi/linalg.hpp"

namespace qrabi::test {

inline Matrix random_matrix(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    Matrix m(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, int d) {
    const Matrix m = random_matrix(rng, d);
    return (m + m.adjoint()) / 2.0;
}

// Full-rank random density matrix A A^dag / tr.
inline Matrix random_density(std::mt19937_64& rng, int d) {
    const Matrix m = random_matrix(rng, d);
    Matrix rho = m * m.adjoint();
    return rho / rho.trace();
}

inline Matrix projector(const Vector& v) { return v * v.adjoint(); }

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// L_n(x) from the explicit sum, independent of the recurrence used by the library.
inline double laguerre_sum(int n, double x) {
    double s = 0.0, fact = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) fact *= k;
        s += binomial(n, k) * std::pow(-x, k) / fact;
    }
    return s;
}

}  // namespace qrabi::test

#include "qrabi/pairing.hpp"

#include <limits>

namespace qrabi {

// Hungarian algorithm with potentials, minimizing -weight.
Pairing max_weight_matching(const RealMatrix& weights) {
    const int n = static_cast<int>(weights.rows());
    const int m = static_cast<int>(weights.cols());
    if (n > m) throw DimensionError("max_weight_matching: more rows than columns");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = -weights(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Pairing out;
    out.target.assign(n, -1);
    out.weight.assign(n, 0.0);
    for (int j = 1; j <= m; ++j) {
        if (p[j] != 0) out.target[p[j] - 1] = j - 1;
    }
    for (int i = 0; i < n; ++i) {
        out.weight[i] = weights(i, out.target[i]);
        Eigen::Index best = 0;
        weights.row(i).maxCoeff(&best);
        if (static_cast<int>(best) != out.target[i] && weights(i, best) > out.weight[i]) ++out.conflicts;
    }
    return out;
}

RealMatrix overlap_weights(const Matrix& approx, const Matrix& exact) {
    if (approx.rows() != exact.rows()) throw DimensionError("overlap_weights: vector length mismatch");
    return (approx.adjoint() * exact).cwiseAbs2();
}

}  // namespace qrabi

#pragma once

#include <vector>

#include "qrabi/hilbert.hpp"

namespace qrabi {

struct Pairing {
    std::vector<int> target;     // target[i] = column matched to row i
    std::vector<double> weight;  // weight of each matched entry
    int conflicts = 0;           // rows whose individual best column went to another row
};

// Global maximum-weight matching of rows to distinct columns (rows <= cols).
Pairing max_weight_matching(const RealMatrix& weights);

// |<approx_i|exact_j>|^2 for unit vectors stored as columns.
RealMatrix overlap_weights(const Matrix& approx, const Matrix& exact);

}  // namespace qrabi

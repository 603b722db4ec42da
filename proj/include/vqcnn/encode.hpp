#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "vqcnn/qsim.hpp"

namespace vqcnn {

// Smallest k with 2^k >= n (n >= 1).
inline int ceil_log2(std::size_t n) {
    int k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

// Amplitude encoding: a D-dimensional real vector becomes the normalized
// amplitudes of a ceil(log2 D)-qubit state (minimum one qubit). Positions
// past D are zero-padded.
inline StateVector amplitude_encode(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("amplitude_encode: empty vector");
    double sq = 0.0;
    for (double v : x) sq += v * v;
    if (sq == 0.0)
        throw std::invalid_argument("amplitude_encode: all-zero vector");
    const double inv_norm = 1.0 / std::sqrt(sq);
    const int num_qubits = std::max(1, ceil_log2(x.size()));
    std::vector<cdouble> amps(std::size_t{1} << num_qubits, 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) amps[j] = x[j] * inv_norm;
    StateVector out(num_qubits);
    out.amplitudes() = std::move(amps);
    return out;
}

}  // namespace vqcnn

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace vqcnn {

// Weights, exponents and reference scales of the data-complexity score,
// plus the gate budget bounds it maps into.
struct ComplexityConfig {
    double alpha1 = 0.25;  // sample-count weight
    double alpha2 = 0.05;  // feature-dimension weight
    double alpha3 = 0.70;  // class-dispersion weight
    double t1 = 3.0;
    double t2 = 2.0;
    double t3 = 3.0;
    double m_ref = 5000.0;  // reference sample count
    double d_ref = 256.0;   // reference feature dimension
    int gate_min = 3;
    int gate_max = 15;

    void validate() const {
        if (alpha1 < 0 || alpha2 < 0 || alpha3 < 0)
            throw std::invalid_argument("complexity weights must be nonnegative");
        if (std::abs(alpha1 + alpha2 + alpha3 - 1.0) > 1e-9)
            throw std::invalid_argument("complexity weights must sum to 1");
        if (t1 <= 1.0 || t2 <= 1.0 || t3 <= 1.0)
            throw std::invalid_argument("complexity exponents must be > 1");
        if (m_ref < 2.0 || d_ref < 2.0)
            throw std::invalid_argument("reference scales must be >= 2");
        if (gate_min < 1 || gate_min > gate_max)
            throw std::invalid_argument("need 1 <= gate_min <= gate_max");
    }
};

struct ComplexityReport {
    double sparsity = 0.0;    // s, fraction of same-class ordered pairs
    double dispersion = 0.0;  // s' = 1 - s
    double q_score = 0.0;
    int gate_count = 0;
};

// Fraction of ordered sample pairs (k, k') with equal labels, including
// k = k'. Closed form sum_c m_c^2 / M^2 over the class counts.
inline double label_sparsity(const std::vector<int>& labels) {
    if (labels.empty())
        throw std::invalid_argument("label_sparsity: empty label list");
    std::unordered_map<int, std::uint64_t> counts;
    for (int y : labels) ++counts[y];
    double same = 0.0;
    for (const auto& [cls, c] : counts)
        same += static_cast<double>(c) * static_cast<double>(c);
    const double m = static_cast<double>(labels.size());
    return same / (m * m);
}

// Q = a1 (log M / log M~)^T1 + a2 (log D / log D~)^T2 + a3 s'^T3
inline double data_complexity(std::size_t sample_count, std::size_t dimension,
                              double s_prime, const ComplexityConfig& cfg) {
    cfg.validate();
    if (sample_count < 2 || dimension < 2)
        throw std::invalid_argument("data_complexity: need M >= 2 and D >= 2");
    if (s_prime < 0.0 || s_prime >= 1.0)
        throw std::invalid_argument("data_complexity: s' must be in [0, 1)");
    const double m_term =
        std::pow(std::log(static_cast<double>(sample_count)) / std::log(cfg.m_ref),
                 cfg.t1);
    const double d_term =
        std::pow(std::log(static_cast<double>(dimension)) / std::log(cfg.d_ref),
                 cfg.t2);
    const double s_term = std::pow(s_prime, cfg.t3);
    return cfg.alpha1 * m_term + cfg.alpha2 * d_term + cfg.alpha3 * s_term;
}

// gate_min + floor(Q * (gate_max - gate_min)), clamped into the bounds.
inline int estimate_gates(double q, const ComplexityConfig& cfg) {
    cfg.validate();
    if (q < 0.0) throw std::invalid_argument("estimate_gates: Q must be >= 0");
    const double span = static_cast<double>(cfg.gate_max - cfg.gate_min);
    int g = cfg.gate_min + static_cast<int>(std::floor(q * span));
    if (g < cfg.gate_min) g = cfg.gate_min;
    if (g > cfg.gate_max) g = cfg.gate_max;
    return g;
}

inline ComplexityReport assess_complexity(const std::vector<int>& labels,
                                          std::size_t dimension,
                                          const ComplexityConfig& cfg) {
    ComplexityReport r;
    r.sparsity = label_sparsity(labels);
    r.dispersion = 1.0 - r.sparsity;
    r.q_score = data_complexity(labels.size(), dimension, r.dispersion, cfg);
    r.gate_count = estimate_gates(r.q_score, cfg);
    return r;
}

}  // namespace vqcnn

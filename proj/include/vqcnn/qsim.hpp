#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vqcnn {

using cdouble = std::complex<double>;

// 2x2 complex matrix, row-major: {m00, m01, m10, m11}
using Mat2 = std::array<cdouble, 4>;

inline bool is_unitary(const Mat2& u, double tol = 1e-12) {
    // U†U entries
    const cdouble a = std::conj(u[0]) * u[0] + std::conj(u[2]) * u[2];
    const cdouble b = std::conj(u[0]) * u[1] + std::conj(u[2]) * u[3];
    const cdouble c = std::conj(u[1]) * u[0] + std::conj(u[3]) * u[2];
    const cdouble d = std::conj(u[1]) * u[1] + std::conj(u[3]) * u[3];
    return std::abs(a - 1.0) < tol && std::abs(b) < tol && std::abs(c) < tol &&
           std::abs(d - 1.0) < tol;
}

// State vector of a q-qubit register. Convention: qubit 0 is the most
// significant bit of the basis index, so for 2 qubits the amplitude order
// is |00>, |01>, |10>, |11> with qubit 0 read leftmost.
class StateVector {
public:
    // |00...0>
    explicit StateVector(int num_qubits)
        : num_qubits_(check_qubits(num_qubits)),
          amps_(std::size_t{1} << num_qubits) {
        amps_[0] = 1.0;
    }

    StateVector(int num_qubits, std::vector<cdouble> amplitudes)
        : num_qubits_(check_qubits(num_qubits)), amps_(std::move(amplitudes)) {
        if (amps_.size() != (std::size_t{1} << num_qubits_))
            throw std::invalid_argument("amplitude vector length must be 2^num_qubits");
        const double n = norm();
        if (std::abs(n - 1.0) > 1e-9)
            throw std::invalid_argument("state vector is not normalized");
    }

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cdouble>& amplitudes() const { return amps_; }
    std::vector<cdouble>& amplitudes() { return amps_; }
    cdouble amplitude(std::size_t basis) const { return amps_[basis]; }

    double norm() const {
        double s = 0.0;
        for (const cdouble& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

private:
    static int check_qubits(int q) {
        if (q < 1) throw std::invalid_argument("num_qubits must be >= 1");
        return q;
    }

    int num_qubits_;
    std::vector<cdouble> amps_;
};

namespace detail {

// Bit position of qubit q within a basis index (qubit 0 = MSB).
inline int bit_pos(int num_qubits, int qubit) { return num_qubits - 1 - qubit; }

// Apply an arbitrary 2x2 matrix to one qubit, in place. No unitarity
// requirement; the non-unitary path is used for analytic derivatives.
inline void apply_matrix_inplace(std::vector<cdouble>& amps, int num_qubits,
                                 const Mat2& m, int qubit) {
    const std::size_t stride = std::size_t{1} << bit_pos(num_qubits, qubit);
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + stride;
            const cdouble a0 = amps[i0];
            const cdouble a1 = amps[i1];
            amps[i0] = m[0] * a0 + m[1] * a1;
            amps[i1] = m[2] * a0 + m[3] * a1;
        }
    }
}

// Apply a 2x2 matrix to the target qubit on the control = 1 subspace.
inline void apply_controlled_matrix_inplace(std::vector<cdouble>& amps,
                                            int num_qubits, const Mat2& m,
                                            int control, int target) {
    const std::size_t cmask = std::size_t{1} << bit_pos(num_qubits, control);
    const std::size_t tmask = std::size_t{1} << bit_pos(num_qubits, target);
    const std::size_t dim = amps.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) && !(i & tmask)) {
            const std::size_t j = i | tmask;
            const cdouble a0 = amps[i];
            const cdouble a1 = amps[j];
            amps[i] = m[0] * a0 + m[1] * a1;
            amps[j] = m[2] * a0 + m[3] * a1;
        }
    }
}

// Derivative of a controlled gate: the control = 0 subspace is projected
// out and the matrix (typically dU/dtheta) acts on the control = 1 part.
inline void apply_controlled_derivative_inplace(std::vector<cdouble>& amps,
                                                int num_qubits, const Mat2& m,
                                                int control, int target) {
    const std::size_t cmask = std::size_t{1} << bit_pos(num_qubits, control);
    const std::size_t tmask = std::size_t{1} << bit_pos(num_qubits, target);
    const std::size_t dim = amps.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(i & cmask)) {
            amps[i] = 0.0;
        } else if (!(i & tmask)) {
            const std::size_t j = i | tmask;
            const cdouble a0 = amps[i];
            const cdouble a1 = amps[j];
            amps[i] = m[0] * a0 + m[1] * a1;
            amps[j] = m[2] * a0 + m[3] * a1;
        }
    }
}

inline void check_qubit_range(int num_qubits, int qubit, const char* what) {
    if (qubit < 0 || qubit >= num_qubits)
        throw std::out_of_range(std::string(what) + " qubit index out of range");
}

}  // namespace detail

// (I x ... x gate x ... x I) |state>
inline StateVector apply_single(const StateVector& state, const Mat2& gate,
                                int qubit) {
    detail::check_qubit_range(state.num_qubits(), qubit, "apply_single");
    std::vector<cdouble> amps = state.amplitudes();
    detail::apply_matrix_inplace(amps, state.num_qubits(), gate, qubit);
    StateVector out(state.num_qubits());
    out.amplitudes() = std::move(amps);
    return out;
}

// gate applied to target on the subspace where control = 1
inline StateVector apply_controlled(const StateVector& state, int control,
                                    int target, const Mat2& gate) {
    detail::check_qubit_range(state.num_qubits(), control, "apply_controlled control");
    detail::check_qubit_range(state.num_qubits(), target, "apply_controlled target");
    if (control == target)
        throw std::invalid_argument("apply_controlled: control equals target");
    std::vector<cdouble> amps = state.amplitudes();
    detail::apply_controlled_matrix_inplace(amps, state.num_qubits(), gate,
                                            control, target);
    StateVector out(state.num_qubits());
    out.amplitudes() = std::move(amps);
    return out;
}

// Probability of each bitstring over the measured qubits, marginalized over
// the rest. measured[0] is the most significant bit of the result index.
inline std::vector<double> marginal_probabilities(
    const StateVector& state, const std::vector<int>& measured) {
    if (measured.empty())
        throw std::invalid_argument("marginal_probabilities: empty qubit list");
    const int nq = state.num_qubits();
    std::vector<bool> seen(static_cast<std::size_t>(nq), false);
    for (int q : measured) {
        detail::check_qubit_range(nq, q, "marginal_probabilities");
        if (seen[static_cast<std::size_t>(q)])
            throw std::invalid_argument("marginal_probabilities: duplicate qubit");
        seen[static_cast<std::size_t>(q)] = true;
    }
    std::vector<double> probs(std::size_t{1} << measured.size(), 0.0);
    const std::size_t dim = state.dim();
    for (std::size_t b = 0; b < dim; ++b) {
        std::size_t c = 0;
        for (int q : measured)
            c = (c << 1) | ((b >> detail::bit_pos(nq, q)) & 1U);
        probs[c] += std::norm(state.amplitude(b));
    }
    return probs;
}

}  // namespace vqcnn

#pragma once

#include <cmath>
#include <stdexcept>

#include "vqcnn/qsim.hpp"

namespace vqcnn {

// Fixed 13-gate alphabet, indexed 1..13.
enum class GateKind : int {
    X = 1,
    Y = 2,
    Z = 3,
    I = 4,
    Rx = 5,
    Ry = 6,
    Rz = 7,
    CNOT = 8,
    CY = 9,
    CZ = 10,
    CRx = 11,
    CRy = 12,
    CRz = 13,
};

inline constexpr int kGateIndexMin = 1;
inline constexpr int kGateIndexMax = 13;

inline GateKind gate_kind_from_index(int index) {
    if (index < kGateIndexMin || index > kGateIndexMax)
        throw std::out_of_range("gate index must be in [1, 13]");
    return static_cast<GateKind>(index);
}

inline int gate_index(GateKind k) { return static_cast<int>(k); }

inline bool is_two_qubit(GateKind k) { return gate_index(k) >= 8; }

inline bool is_parameterized(GateKind k) {
    switch (k) {
        case GateKind::Rx:
        case GateKind::Ry:
        case GateKind::Rz:
        case GateKind::CRx:
        case GateKind::CRy:
        case GateKind::CRz:
            return true;
        default:
            return false;
    }
}

// 2x2 matrix of the gate (for controlled kinds, the matrix applied to the
// target on the control = 1 subspace).
inline Mat2 gate_matrix(GateKind k, double theta = 0.0) {
    const cdouble i(0.0, 1.0);
    const double h = theta / 2.0;
    switch (k) {
        case GateKind::X:
        case GateKind::CNOT:
            return {0.0, 1.0, 1.0, 0.0};
        case GateKind::Y:
        case GateKind::CY:
            return {0.0, -i, i, 0.0};
        case GateKind::Z:
        case GateKind::CZ:
            return {1.0, 0.0, 0.0, -1.0};
        case GateKind::I:
            return {1.0, 0.0, 0.0, 1.0};
        case GateKind::Rx:
        case GateKind::CRx:
            return {std::cos(h), -i * std::sin(h), -i * std::sin(h), std::cos(h)};
        case GateKind::Ry:
        case GateKind::CRy:
            return {std::cos(h), -std::sin(h), std::sin(h), std::cos(h)};
        case GateKind::Rz:
        case GateKind::CRz:
            return {std::exp(-i * h), 0.0, 0.0, std::exp(i * h)};
    }
    throw std::logic_error("unreachable gate kind");
}

// d/dtheta of gate_matrix for the parameterized kinds.
inline Mat2 gate_matrix_derivative(GateKind k, double theta) {
    const cdouble i(0.0, 1.0);
    const double h = theta / 2.0;
    switch (k) {
        case GateKind::Rx:
        case GateKind::CRx:
            return {-0.5 * std::sin(h), -0.5 * i * std::cos(h),
                    -0.5 * i * std::cos(h), -0.5 * std::sin(h)};
        case GateKind::Ry:
        case GateKind::CRy:
            return {-0.5 * std::sin(h), -0.5 * std::cos(h), 0.5 * std::cos(h),
                    -0.5 * std::sin(h)};
        case GateKind::Rz:
        case GateKind::CRz:
            return {-0.5 * i * std::exp(-i * h), 0.0, 0.0, 0.5 * i * std::exp(i * h)};
        default:
            throw std::invalid_argument("gate kind has no parameter");
    }
}

// A gate placed on concrete qubits. control = -1 for single-qubit kinds.
struct PlacedGate {
    GateKind kind;
    int target;
    int control;
};

// Odd/even placement rule over a qubit pair. Single-qubit kinds: odd index
// acts on the first qubit, even on the second. Two-qubit kinds: odd index
// controls from the first qubit, even from the second.
inline PlacedGate decode_gate(int index, int first_qubit, int second_qubit) {
    const GateKind kind = gate_kind_from_index(index);
    if (first_qubit == second_qubit)
        throw std::invalid_argument("decode_gate: pair qubits must differ");
    const bool odd = (index % 2) == 1;
    if (!is_two_qubit(kind))
        return {kind, odd ? first_qubit : second_qubit, -1};
    if (odd) return {kind, second_qubit, first_qubit};
    return {kind, first_qubit, second_qubit};
}

}  // namespace vqcnn

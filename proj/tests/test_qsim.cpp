#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vqcnn/gates.hpp"
#include "vqcnn/qsim.hpp"
#include "vqcnn/rng.hpp"

using namespace vqcnn;

namespace {

StateVector basis_state(int nq, std::size_t b) {
    std::vector<cdouble> amps(std::size_t{1} << nq, 0.0);
    amps[b] = 1.0;
    StateVector s(nq);
    s.amplitudes() = std::move(amps);
    return s;
}

double max_amplitude_diff(const std::vector<cdouble>& a,
                          const std::vector<cdouble>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

TEST(StateVector, StartsInGroundState) {
    StateVector s(3);
    EXPECT_EQ(s.dim(), 8u);
    EXPECT_EQ(s.amplitude(0), cdouble(1.0));
    EXPECT_NEAR(s.norm(), 1.0, 1e-15);
}

TEST(StateVector, RejectsBadInputs) {
    EXPECT_THROW(StateVector(0), std::invalid_argument);
    EXPECT_THROW(StateVector(2, {1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(StateVector(1, {0.5, 0.5}), std::invalid_argument);  // norm != 1
}

TEST(ApplySingle, XFlipsQubitZero) {
    // qubit 0 is the MSB: X on qubit 0 of |00> gives |10> (index 2)
    StateVector s = apply_single(StateVector(2), gate_matrix(GateKind::X), 0);
    EXPECT_NEAR(std::abs(s.amplitude(2)), 1.0, 1e-15);
}

TEST(ApplySingle, IdentityLeavesStateAlone) {
    StateVector s = basis_state(2, 3);
    StateVector t = apply_single(s, gate_matrix(GateKind::I), 1);
    EXPECT_EQ(max_amplitude_diff(s.amplitudes(), t.amplitudes()), 0.0);
}

TEST(ApplySingle, RyHalfPiOnZero) {
    const double pi = std::acos(-1.0);
    StateVector s = apply_single(StateVector(1), gate_matrix(GateKind::Ry, pi / 2), 0);
    EXPECT_NEAR(s.amplitude(0).real(), std::cos(pi / 4), 1e-12);
    EXPECT_NEAR(s.amplitude(1).real(), std::sin(pi / 4), 1e-12);
}

TEST(ApplySingle, QubitOutOfRange) {
    EXPECT_THROW(apply_single(StateVector(2), gate_matrix(GateKind::X), 2),
                 std::out_of_range);
    EXPECT_THROW(apply_single(StateVector(2), gate_matrix(GateKind::X), -1),
                 std::out_of_range);
}

TEST(ApplyControlled, CnotTextbook) {
    // |10> -> |11>
    StateVector s = apply_controlled(basis_state(2, 2), 0, 1,
                                     gate_matrix(GateKind::CNOT));
    EXPECT_NEAR(std::abs(s.amplitude(3)), 1.0, 1e-15);
}

TEST(ApplyControlled, ControlUnsetIsIdentity) {
    StateVector s = basis_state(2, 1);  // |01>, control qubit 0 unset
    StateVector t = apply_controlled(s, 0, 1, gate_matrix(GateKind::CNOT));
    EXPECT_EQ(max_amplitude_diff(s.amplitudes(), t.amplitudes()), 0.0);
}

TEST(ApplyControlled, CrzOnBellMatchesDenseOracle) {
    const double pi = std::acos(-1.0);
    const double inv = 1.0 / std::sqrt(2.0);
    StateVector bell(2, {inv, 0.0, 0.0, inv});
    const Mat2 crz = gate_matrix(GateKind::CRz, pi);
    StateVector got = apply_controlled(bell, 0, 1, crz);
    const auto expect =
        oracles::matvec(oracles::controlled_gate_dense(2, crz, 0, 1),
                        bell.amplitudes());
    EXPECT_LT(max_amplitude_diff(got.amplitudes(), expect), 1e-12);
}

TEST(ApplyControlled, RejectsEqualControlTarget) {
    EXPECT_THROW(apply_controlled(StateVector(2), 1, 1, gate_matrix(GateKind::X)),
                 std::invalid_argument);
}

TEST(Marginals, FullAndPartial) {
    StateVector s(2);  // |00>
    const auto p0 = marginal_probabilities(s, {0});
    EXPECT_NEAR(p0[0], 1.0, 1e-15);
    EXPECT_NEAR(p0[1], 0.0, 1e-15);

    const double inv = 1.0 / std::sqrt(2.0);
    StateVector bell(2, {inv, 0.0, 0.0, inv});
    const auto p = marginal_probabilities(bell, {0});
    EXPECT_NEAR(p[0], 0.5, 1e-12);
    EXPECT_NEAR(p[1], 0.5, 1e-12);

    const auto full = marginal_probabilities(bell, {0, 1});
    for (std::size_t b = 0; b < 4; ++b)
        EXPECT_NEAR(full[b], std::norm(bell.amplitude(b)), 1e-15);
}

TEST(Marginals, RejectsBadQubitLists) {
    StateVector s(2);
    EXPECT_THROW(marginal_probabilities(s, {}), std::invalid_argument);
    EXPECT_THROW(marginal_probabilities(s, {0, 0}), std::invalid_argument);
    EXPECT_THROW(marginal_probabilities(s, {0, 2}), std::out_of_range);
}

TEST(GateSet, MatricesAreUnitary) {
    for (int idx = 1; idx <= 13; ++idx)
        EXPECT_TRUE(is_unitary(gate_matrix(gate_kind_from_index(idx), 0.7)))
            << "gate index " << idx;
}

// Property: random circuits on small registers match the Kronecker oracle
// and preserve the norm.
TEST(Properties, RandomCircuitsMatchDenseOracle) {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const int nq = 1 + static_cast<int>(rng.uniform_index(4));
        std::vector<cdouble> amps(std::size_t{1} << nq);
        double sq = 0.0;
        for (auto& a : amps) {
            a = cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1));
            sq += std::norm(a);
        }
        for (auto& a : amps) a /= std::sqrt(sq);
        StateVector s(nq);
        s.amplitudes() = amps;
        std::vector<cdouble> dense = amps;

        const int depth = 1 + static_cast<int>(rng.uniform_index(8));
        for (int d = 0; d < depth; ++d) {
            const int idx = 1 + static_cast<int>(rng.uniform_index(13));
            const GateKind kind = gate_kind_from_index(idx);
            const double theta = rng.uniform(-3.14, 3.14);
            const Mat2 m = gate_matrix(kind, theta);
            if (!is_two_qubit(kind) || nq == 1) {
                const int q = static_cast<int>(rng.uniform_index(nq));
                const Mat2 use = is_two_qubit(kind) ? gate_matrix(GateKind::I) : m;
                s = apply_single(s, use, q);
                dense = oracles::matvec(oracles::single_gate_dense(nq, use, q), dense);
            } else {
                const int c = static_cast<int>(rng.uniform_index(nq));
                int t = static_cast<int>(rng.uniform_index(nq - 1));
                if (t >= c) ++t;
                s = apply_controlled(s, c, t, m);
                dense = oracles::matvec(oracles::controlled_gate_dense(nq, m, c, t),
                                        dense);
            }
        }
        EXPECT_LT(max_amplitude_diff(s.amplitudes(), dense), 1e-10);
        EXPECT_NEAR(s.norm(), 1.0, 1e-9);
    }
}

TEST(Properties, DisjointQubitGatesCommute) {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cdouble> amps(8);
        double sq = 0.0;
        for (auto& a : amps) {
            a = cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1));
            sq += std::norm(a);
        }
        for (auto& a : amps) a /= std::sqrt(sq);
        StateVector s(3);
        s.amplitudes() = amps;
        const Mat2 a = gate_matrix(GateKind::Rx, rng.uniform(-3, 3));
        const Mat2 b = gate_matrix(GateKind::Ry, rng.uniform(-3, 3));
        StateVector ab = apply_single(apply_single(s, a, 0), b, 1);
        StateVector ba = apply_single(apply_single(s, b, 1), a, 0);
        EXPECT_LT(max_amplitude_diff(ab.amplitudes(), ba.amplitudes()), 1e-12);
    }
}

TEST(Properties, MarginalsAreADistribution) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cdouble> amps(16);
        double sq = 0.0;
        for (auto& a : amps) {
            a = cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1));
            sq += std::norm(a);
        }
        for (auto& a : amps) a /= std::sqrt(sq);
        StateVector s(4);
        s.amplitudes() = amps;
        const auto p = marginal_probabilities(s, {1, 3});
        double total = 0.0;
        for (double v : p) {
            EXPECT_GE(v, 0.0);
            total += v;
        }
        EXPECT_NEAR(total, 1.0, 1e-9);
    }
}

#include <gtest/gtest.h>

#include <cmath>

#include "vqcnn/encode.hpp"
#include "vqcnn/rng.hpp"

using namespace vqcnn;

TEST(AmplitudeEncode, TwoElementVector) {
    StateVector s = amplitude_encode({3.0, 4.0});
    EXPECT_EQ(s.num_qubits(), 1);
    EXPECT_NEAR(s.amplitude(0).real(), 0.6, 1e-12);
    EXPECT_NEAR(s.amplitude(1).real(), 0.8, 1e-12);
}

TEST(AmplitudeEncode, BasisVectorPassesThrough) {
    StateVector s = amplitude_encode({1.0, 0.0, 0.0, 0.0});
    EXPECT_EQ(s.num_qubits(), 2);
    EXPECT_NEAR(std::abs(s.amplitude(0)), 1.0, 1e-15);
}

TEST(AmplitudeEncode, PadsNonPowerOfTwo) {
    StateVector s = amplitude_encode({1.0, 1.0, 1.0});
    EXPECT_EQ(s.num_qubits(), 2);
    const double v = 1.0 / std::sqrt(3.0);
    EXPECT_NEAR(s.amplitude(0).real(), v, 1e-12);
    EXPECT_NEAR(s.amplitude(1).real(), v, 1e-12);
    EXPECT_NEAR(s.amplitude(2).real(), v, 1e-12);
    EXPECT_NEAR(std::abs(s.amplitude(3)), 0.0, 1e-15);
}

TEST(AmplitudeEncode, SingleElementGetsOneQubit) {
    StateVector s = amplitude_encode({2.5});
    EXPECT_EQ(s.num_qubits(), 1);
    EXPECT_NEAR(s.amplitude(0).real(), 1.0, 1e-12);
}

TEST(AmplitudeEncode, RejectsDegenerateInput) {
    EXPECT_THROW(amplitude_encode({}), std::invalid_argument);
    EXPECT_THROW(amplitude_encode({0.0, 0.0}), std::invalid_argument);
}

TEST(AmplitudeEncode, ScaleInvarianceAndRoundTrip) {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 1 + rng.uniform_index(12);
        std::vector<double> x(d);
        bool nonzero = false;
        for (double& v : x) {
            v = rng.uniform(-2.0, 2.0);
            nonzero |= v != 0.0;
        }
        if (!nonzero) x[0] = 1.0;
        const double alpha = rng.uniform(0.1, 9.0);
        std::vector<double> scaled = x;
        for (double& v : scaled) v *= alpha;

        StateVector a = amplitude_encode(x);
        StateVector b = amplitude_encode(scaled);
        double norm_x = 0.0;
        for (double v : x) norm_x += v * v;
        norm_x = std::sqrt(norm_x);
        for (std::size_t j = 0; j < a.dim(); ++j) {
            EXPECT_NEAR(std::abs(a.amplitude(j) - b.amplitude(j)), 0.0, 1e-12);
            const double recovered = a.amplitude(j).real() * norm_x;
            const double expect = j < d ? x[j] : 0.0;
            EXPECT_NEAR(recovered, expect, 1e-12);
        }
        EXPECT_NEAR(a.norm(), 1.0, 1e-12);
    }
}

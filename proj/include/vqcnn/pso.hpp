#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vqcnn/circuit.hpp"
#include "vqcnn/gates.hpp"
#include "vqcnn/rng.hpp"
#include "vqcnn/train.hpp"

namespace vqcnn {

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> pbest_position;
    double pbest_score = -1.0;
    std::vector<double> pbest_theta;
};

struct PsoConfig {
    int swarm_size = 15;
    int iterations = 100;
    double inertia = 0.8;
    double cognitive = 0.5;
    double social = 0.5;
    double velocity_clamp = 6.0;
    std::uint64_t rng_seed = 0;
    TrainConfig inner;  // fitness-evaluation training setup

    void validate() const {
        if (swarm_size < 1) throw std::invalid_argument("swarm_size must be >= 1");
        if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
        if (inertia < 0.0 || cognitive < 0.0 || social < 0.0)
            throw std::invalid_argument("PSO coefficients must be >= 0");
        if (velocity_clamp <= 0.0)
            throw std::invalid_argument("velocity_clamp must be > 0");
        inner.validate();
    }
};

struct SearchResult {
    UStructure gbest_structure;
    std::vector<double> gbest_theta;
    double gbest_score = -1.0;
    std::vector<double> trace;  // per-iteration gbest score, length iterations + 1
};

// Round to nearest (ties away from zero), clamp into the gate-index range.
inline UStructure decode_position(const std::vector<double>& position) {
    if (position.empty())
        throw std::invalid_argument("decode_position: empty position");
    UStructure u;
    u.gates.reserve(position.size());
    for (double x : position) {
        int g = static_cast<int>(std::llround(x));
        if (g < kGateIndexMin) g = kGateIndexMin;
        if (g > kGateIndexMax) g = kGateIndexMax;
        u.gates.push_back(g);
    }
    return u;
}

// One velocity/position update for the whole swarm. r1, r2 are drawn per
// particle in swarm order from the supplied generator.
inline void step(std::vector<Particle>& swarm,
                 const std::vector<double>& gbest_position, const PsoConfig& cfg,
                 Rng& rng) {
    for (Particle& p : swarm) {
        if (p.position.size() != gbest_position.size() ||
            p.velocity.size() != gbest_position.size() ||
            p.pbest_position.size() != gbest_position.size())
            throw std::invalid_argument("step: dimension mismatch");
        for (std::size_t d = 0; d < p.position.size(); ++d) {
            const double r1 = rng.uniform();
            const double r2 = rng.uniform();
            double v = cfg.inertia * p.velocity[d] +
                       cfg.cognitive * r1 * (p.pbest_position[d] - p.position[d]) +
                       cfg.social * r2 * (gbest_position[d] - p.position[d]);
            if (v > cfg.velocity_clamp) v = cfg.velocity_clamp;
            if (v < -cfg.velocity_clamp) v = -cfg.velocity_clamp;
            p.velocity[d] = v;
            p.position[d] += v;
        }
    }
}

// Training-set accuracy of the structure after a fresh training run.
inline std::pair<double, std::vector<double>> fitness(
    const UStructure& structure, const Dataset& dataset, int num_qubits,
    int class_count, const TrainConfig& inner) {
    const VqcnnLayout layout = build_layout(num_qubits, class_count, structure);
    auto [theta, history] = train_model(layout, dataset, inner);
    return {history.final_accuracy, std::move(theta)};
}

// Swarm search over gate-index vectors at a fixed budget. pbest/gbest move
// only on strict improvement; ties keep the incumbent.
inline SearchResult search(const Dataset& dataset, int gate_budget,
                           int num_qubits, int class_count,
                           const PsoConfig& cfg) {
    cfg.validate();
    if (gate_budget < 1)
        throw std::invalid_argument("search: gate_budget must be >= 1");

    Rng rng(cfg.rng_seed);
    std::vector<Particle> swarm(static_cast<std::size_t>(cfg.swarm_size));
    for (Particle& p : swarm) {
        p.position.resize(static_cast<std::size_t>(gate_budget));
        for (double& x : p.position)
            x = rng.uniform(static_cast<double>(kGateIndexMin),
                            static_cast<double>(kGateIndexMax));
        p.velocity.assign(static_cast<std::size_t>(gate_budget), 0.0);
    }

    SearchResult result;
    std::vector<double> gbest_position;

    const auto evaluate_swarm = [&](int iteration) {
        for (std::size_t i = 0; i < swarm.size(); ++i) {
            Particle& p = swarm[i];
            TrainConfig inner = cfg.inner;
            inner.rng_seed = derive_seed(cfg.rng_seed, i + 1,
                                         static_cast<std::uint64_t>(iteration));
            auto [score, theta] = fitness(decode_position(p.position), dataset,
                                          num_qubits, class_count, inner);
            if (score > p.pbest_score) {
                p.pbest_score = score;
                p.pbest_position = p.position;
                p.pbest_theta = theta;
            }
            if (score > result.gbest_score) {
                result.gbest_score = score;
                result.gbest_structure = decode_position(p.position);
                result.gbest_theta = std::move(theta);
                gbest_position = p.position;
            }
        }
    };

    evaluate_swarm(0);
    result.trace.push_back(result.gbest_score);
    for (int t = 1; t <= cfg.iterations; ++t) {
        step(swarm, gbest_position, cfg, rng);
        evaluate_swarm(t);
        result.trace.push_back(result.gbest_score);
    }
    return result;
}

// One data row per PSO iteration (the pre-iteration score stays internal).
inline void write_trace(std::ostream& os, const SearchResult& result) {
    os << "iteration\tgbest_score\n";
    os.precision(17);
    for (std::size_t i = 1; i < result.trace.size(); ++i)
        os << i << "\t" << result.trace[i] << "\n";
}

}  // namespace vqcnn

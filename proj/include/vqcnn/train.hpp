#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vqcnn/circuit.hpp"
#include "vqcnn/data.hpp"
#include "vqcnn/encode.hpp"
#include "vqcnn/rng.hpp"

namespace vqcnn {

inline constexpr double kProbFloor = 1e-12;

struct TrainConfig {
    double learning_rate = 0.01;
    int batch_size = 25;
    int iterations = 200;
    std::uint64_t rng_seed = 0;
    double gradient_step = 1e-5;  // finite-difference half-width (oracle contract)

    void validate() const {
        if (learning_rate < 0.0)
            throw std::invalid_argument("learning_rate must be >= 0");
        if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
        if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
        if (gradient_step <= 0.0)
            throw std::invalid_argument("gradient_step must be > 0");
    }
};

struct TrainHistory {
    std::vector<double> loss;  // one entry per iteration
    double final_accuracy = 0.0;
};

inline void write_history(std::ostream& os, const TrainHistory& history) {
    os << "iteration\tloss\n";
    os.precision(17);
    for (std::size_t i = 0; i < history.loss.size(); ++i)
        os << i << "\t" << history.loss[i] << "\n";
}

// -log(max(probs[label], floor))
inline double cross_entropy_loss(const std::vector<double>& probs, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
        throw std::invalid_argument("cross_entropy_loss: label out of range");
    return -std::log(std::max(probs[static_cast<std::size_t>(label)], kProbFloor));
}

// ----- Analytic differentiation -----
//
// Each trainable angle enters through rotation gates whose matrix
// derivative is known in closed form, so d|psi>/dtheta_j is the sum over
// the gate instances carrying slot j of (suffix circuit) * dG * (prefix
// state). Class-probability gradients follow by the chain rule through the
// marginalization and the mask renormalization.

namespace detail {

struct ForwardTrace {
    std::vector<std::vector<cdouble>> states;  // states[k] = before instance k
    std::vector<double> marginals;             // over measured qubits, unmasked
    double mass = 0.0;                         // unmasked probability total
    std::vector<double> probs;                 // renormalized class probabilities
};

inline ForwardTrace forward_trace(const VqcnnLayout& layout,
                                  const std::vector<GateInstance>& seq,
                                  const std::vector<double>& theta,
                                  const StateVector& input) {
    ForwardTrace trace;
    trace.states.reserve(seq.size() + 1);
    trace.states.push_back(input.amplitudes());
    for (const GateInstance& g : seq) {
        std::vector<cdouble> next = trace.states.back();
        const double t =
            g.param_index >= 0 ? theta[static_cast<std::size_t>(g.param_index)] : 0.0;
        apply_instance(next, layout.num_qubits, g, t);
        trace.states.push_back(std::move(next));
    }
    StateVector out(layout.num_qubits);
    out.amplitudes() = trace.states.back();
    trace.marginals = marginal_probabilities(out, layout.measured);
    trace.mass = 0.0;
    for (int c = 0; c < layout.class_count; ++c)
        trace.mass += trace.marginals[static_cast<std::size_t>(c)];
    trace.probs = mask_and_renormalize(trace.marginals, layout.class_count);
    return trace;
}

// Gradient of a scalar loss given dL/d(class probs) at the forward output.
inline std::vector<double> backward(const VqcnnLayout& layout,
                                    const std::vector<GateInstance>& seq,
                                    const std::vector<double>& theta,
                                    const ForwardTrace& trace,
                                    const std::vector<double>& dloss_dprobs) {
    const int num_params = count_parameters(layout);
    const int nq = layout.num_qubits;

    // chain rule through r_c = m_c / S
    double inner = 0.0;
    for (int c = 0; c < layout.class_count; ++c)
        inner += dloss_dprobs[static_cast<std::size_t>(c)] *
                 trace.probs[static_cast<std::size_t>(c)];
    std::vector<double> dloss_dmarg(trace.marginals.size(), 0.0);
    for (int c = 0; c < layout.class_count; ++c)
        dloss_dmarg[static_cast<std::size_t>(c)] =
            (dloss_dprobs[static_cast<std::size_t>(c)] - inner) / trace.mass;

    // per-basis-state weight: dL/dm of the measured bitstring it maps to
    const std::size_t dim = std::size_t{1} << nq;
    std::vector<double> weight(dim, 0.0);
    for (std::size_t b = 0; b < dim; ++b) {
        std::size_t c = 0;
        for (int q : layout.measured)
            c = (c << 1) | ((b >> bit_pos(nq, q)) & 1U);
        weight[b] = dloss_dmarg[c];
    }

    const std::vector<cdouble>& final_state = trace.states.back();
    std::vector<double> grad(static_cast<std::size_t>(num_params), 0.0);

    for (std::size_t k = 0; k < seq.size(); ++k) {
        const GateInstance& g = seq[k];
        if (g.param_index < 0) continue;
        const double t = theta[static_cast<std::size_t>(g.param_index)];
        // tangent state for this single occurrence
        std::vector<cdouble> tangent = trace.states[k];
        const Mat2 dm = gate_matrix_derivative(g.kind, t);
        if (g.control < 0)
            apply_matrix_inplace(tangent, nq, dm, g.target);
        else
            apply_controlled_derivative_inplace(tangent, nq, dm, g.control, g.target);
        for (std::size_t j = k + 1; j < seq.size(); ++j) {
            const GateInstance& h = seq[j];
            const double ht = h.param_index >= 0
                                  ? theta[static_cast<std::size_t>(h.param_index)]
                                  : 0.0;
            apply_instance(tangent, nq, h, ht);
        }
        // dp_b/dtheta = 2 Re(conj(psi_b) tangent_b)
        double contrib = 0.0;
        for (std::size_t b = 0; b < dim; ++b)
            contrib += weight[b] * 2.0 *
                       (std::conj(final_state[b]) * tangent[b]).real();
        grad[static_cast<std::size_t>(g.param_index)] += contrib;
    }
    return grad;
}

inline std::vector<double> cross_entropy_dprobs(const std::vector<double>& probs,
                                                int label) {
    std::vector<double> d(probs.size(), 0.0);
    const double p = probs[static_cast<std::size_t>(label)];
    if (p >= kProbFloor) d[static_cast<std::size_t>(label)] = -1.0 / p;
    return d;
}

}  // namespace detail

// Mean cross-entropy gradient over the selected samples.
inline std::vector<double> gradient(const VqcnnLayout& layout,
                                    const std::vector<double>& theta,
                                    const Dataset& dataset,
                                    const std::vector<std::size_t>& indices) {
    check_theta(layout, theta);
    if (indices.empty()) throw std::invalid_argument("gradient: empty batch");
    const std::vector<GateInstance> seq = flatten(layout);
    std::vector<double> grad(theta.size(), 0.0);
    for (std::size_t i : indices) {
        const StateVector input = amplitude_encode(dataset.features[i]);
        const detail::ForwardTrace trace =
            detail::forward_trace(layout, seq, theta, input);
        const std::vector<double> dprobs =
            detail::cross_entropy_dprobs(trace.probs, dataset.labels[i]);
        const std::vector<double> g =
            detail::backward(layout, seq, theta, trace, dprobs);
        for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += g[j];
    }
    const double inv = 1.0 / static_cast<double>(indices.size());
    for (double& v : grad) v *= inv;
    return grad;
}

inline std::vector<double> gradient(const VqcnnLayout& layout,
                                    const std::vector<double>& theta,
                                    const Dataset& dataset) {
    std::vector<std::size_t> all(dataset.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return gradient(layout, theta, dataset, all);
}

inline double evaluate(const VqcnnLayout& layout, const std::vector<double>& theta,
                       const Dataset& dataset) {
    if (dataset.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const std::vector<double> probs =
            forward(layout, theta, amplitude_encode(dataset.features[i]));
        if (predict(probs) == dataset.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

inline std::vector<double> init_parameters(const VqcnnLayout& layout, Rng& rng) {
    const double pi = 3.1415926535897932384626433832795;
    std::vector<double> theta(static_cast<std::size_t>(count_parameters(layout)));
    for (double& t : theta) t = rng.uniform(-pi, pi);
    return theta;
}

// Minibatch gradient descent with seeded without-replacement batches.
inline std::pair<std::vector<double>, TrainHistory> train_model(
    const VqcnnLayout& layout, const Dataset& dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.size() == 0) throw std::invalid_argument("train_model: empty dataset");
    for (int y : dataset.labels)
        if (y < 0 || y >= layout.class_count)
            throw std::invalid_argument("train_model: label outside class range");

    const std::size_t batch =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), dataset.size());
    Rng rng(cfg.rng_seed);
    std::vector<double> theta = init_parameters(layout, rng);
    const std::vector<GateInstance> seq = flatten(layout);

    // cache encodings; samples are reused across iterations
    std::vector<StateVector> encoded;
    encoded.reserve(dataset.size());
    for (const auto& row : dataset.features) encoded.push_back(amplitude_encode(row));

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainHistory history;
    history.loss.reserve(static_cast<std::size_t>(cfg.iterations));
    for (int it = 0; it < cfg.iterations; ++it) {
        // partial Fisher-Yates: the first `batch` slots are the draw
        for (std::size_t j = 0; j < batch; ++j) {
            const std::size_t k =
                j + static_cast<std::size_t>(rng.uniform_index(order.size() - j));
            std::swap(order[j], order[k]);
        }
        double loss = 0.0;
        std::vector<double> grad(theta.size(), 0.0);
        for (std::size_t j = 0; j < batch; ++j) {
            const std::size_t i = order[j];
            const detail::ForwardTrace trace =
                detail::forward_trace(layout, seq, theta, encoded[i]);
            loss += cross_entropy_loss(trace.probs, dataset.labels[i]);
            const std::vector<double> g = detail::backward(
                layout, seq, theta, trace,
                detail::cross_entropy_dprobs(trace.probs, dataset.labels[i]));
            for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += g[p];
        }
        const double inv = 1.0 / static_cast<double>(batch);
        history.loss.push_back(loss * inv);
        for (std::size_t p = 0; p < theta.size(); ++p)
            theta[p] -= cfg.learning_rate * grad[p] * inv;
    }
    history.final_accuracy = evaluate(layout, theta, dataset);
    return {std::move(theta), std::move(history)};
}

}  // namespace vqcnn

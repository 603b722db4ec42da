#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vqcnn/encode.hpp"
#include "vqcnn/gates.hpp"
#include "vqcnn/qsim.hpp"

namespace vqcnn {

// Ordered gate-index list defining the convolution module U.
struct UStructure {
    std::vector<int> gates;

    void validate() const {
        if (gates.empty()) throw std::invalid_argument("UStructure: empty gate list");
        for (int g : gates) gate_kind_from_index(g);
    }

    int parameterized_count() const {
        int p = 0;
        for (int g : gates)
            if (is_parameterized(gate_kind_from_index(g))) ++p;
        return p;
    }
};

// One convolution + pooling stage. U modules act on every adjacent pair of
// active qubits; each pool pair discards its second qubit.
struct VqcnnLayer {
    std::vector<int> active;                    // active qubits entering the layer
    std::vector<std::pair<int, int>> pools;     // (retained, discarded)
};

struct VqcnnLayout {
    int num_qubits = 0;
    int class_count = 0;
    UStructure u_structure;
    std::vector<VqcnnLayer> layers;
    std::vector<int> measured;  // retained qubits after the final layer

    int num_layers() const { return static_cast<int>(layers.size()); }
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Stack convolution/pooling layers on num_qubits qubits until only the
// ceil(log2 C) measured qubits remain. When C is not a power of two, one
// extra pool-free convolution layer tops off the stack; this keeps the
// per-layer parameter accounting L * (p_U + 2).
inline VqcnnLayout build_layout(int num_qubits, int class_count,
                                UStructure u_structure) {
    if (num_qubits < 2 || !is_power_of_two(static_cast<std::size_t>(num_qubits)))
        throw std::invalid_argument("build_layout: num_qubits must be a power of two >= 2");
    if (class_count < 2)
        throw std::invalid_argument("build_layout: class_count must be >= 2");
    if (static_cast<std::size_t>(class_count) > (std::size_t{1} << num_qubits))
        throw std::invalid_argument("build_layout: class_count exceeds 2^num_qubits");
    u_structure.validate();

    const int n_meas = std::max(1, ceil_log2(static_cast<std::size_t>(class_count)));

    VqcnnLayout layout;
    layout.num_qubits = num_qubits;
    layout.class_count = class_count;
    layout.u_structure = std::move(u_structure);

    std::vector<int> active(static_cast<std::size_t>(num_qubits));
    for (int q = 0; q < num_qubits; ++q) active[static_cast<std::size_t>(q)] = q;

    while (static_cast<int>(active.size()) > n_meas) {
        VqcnnLayer layer;
        layer.active = active;
        const int n_pools = std::min(static_cast<int>(active.size()) / 2,
                                     static_cast<int>(active.size()) - n_meas);
        std::vector<int> next;
        std::size_t idx = 0;
        for (int p = 0; p < n_pools; ++p) {
            layer.pools.emplace_back(active[idx], active[idx + 1]);
            next.push_back(active[idx]);
            idx += 2;
        }
        for (; idx < active.size(); ++idx) next.push_back(active[idx]);
        layout.layers.push_back(std::move(layer));
        active = std::move(next);
    }

    // Extra convolution-only layer for non-power-of-two class counts, and
    // for the degenerate case where no pooling is needed at all.
    if (!is_power_of_two(static_cast<std::size_t>(class_count)) ||
        layout.layers.empty()) {
        VqcnnLayer layer;
        layer.active = active;
        layout.layers.push_back(std::move(layer));
    }

    layout.measured = active;
    return layout;
}

// L * (p_U + 2): every layer carries one shared U parameter set plus the
// two pooling angles.
inline int count_parameters(const VqcnnLayout& layout) {
    return layout.num_layers() * (layout.u_structure.parameterized_count() + 2);
}

// Total fundamental gates in one forward pass.
inline int gate_cost(const VqcnnLayout& layout) {
    int total = 0;
    const int u_len = static_cast<int>(layout.u_structure.gates.size());
    for (const VqcnnLayer& layer : layout.layers) {
        const int k = static_cast<int>(layer.active.size());
        total += (k - 1) * u_len + static_cast<int>(layer.pools.size()) * 2;
    }
    return total;
}

// One concrete gate application. param_index = -1 for fixed gates.
struct GateInstance {
    GateKind kind;
    int target;
    int control;      // -1 for single-qubit gates
    int param_index;  // index into the flat parameter vector
};

// Expand the layered layout into the full ordered gate sequence. Within a
// layer all U instances share the layer's parameter slots (and likewise
// the V instances), so a slot may appear in several instances.
inline std::vector<GateInstance> flatten(const VqcnnLayout& layout) {
    std::vector<GateInstance> seq;
    const int p_u = layout.u_structure.parameterized_count();
    const int per_layer = p_u + 2;
    for (int l = 0; l < layout.num_layers(); ++l) {
        const VqcnnLayer& layer = layout.layers[static_cast<std::size_t>(l)];
        const int base = l * per_layer;
        const int k = static_cast<int>(layer.active.size());
        for (int pair = 0; pair + 1 < k; ++pair) {
            const int first = layer.active[static_cast<std::size_t>(pair)];
            const int second = layer.active[static_cast<std::size_t>(pair + 1)];
            int slot = 0;
            for (int g : layout.u_structure.gates) {
                const PlacedGate placed = decode_gate(g, first, second);
                const bool has_param = is_parameterized(placed.kind);
                seq.push_back({placed.kind, placed.target, placed.control,
                               has_param ? base + slot : -1});
                if (has_param) ++slot;
            }
        }
        // V module: CRz then CRx, control = discarded qubit, target = retained
        for (const auto& [retained, discarded] : layer.pools) {
            seq.push_back({GateKind::CRz, retained, discarded, base + p_u});
            seq.push_back({GateKind::CRx, retained, discarded, base + p_u + 1});
        }
    }
    return seq;
}

namespace detail {

inline void apply_instance(std::vector<cdouble>& amps, int num_qubits,
                           const GateInstance& g, double theta) {
    const Mat2 m = gate_matrix(g.kind, theta);
    if (g.control < 0)
        apply_matrix_inplace(amps, num_qubits, m, g.target);
    else
        apply_controlled_matrix_inplace(amps, num_qubits, m, g.control, g.target);
}

}  // namespace detail

inline void check_theta(const VqcnnLayout& layout, const std::vector<double>& theta) {
    if (static_cast<int>(theta.size()) != count_parameters(layout))
        throw std::invalid_argument("parameter vector length mismatch");
}

// Run the full circuit on an encoded input.
inline StateVector run_circuit(const VqcnnLayout& layout,
                               const std::vector<double>& theta,
                               const StateVector& input) {
    check_theta(layout, theta);
    if (input.num_qubits() != layout.num_qubits)
        throw std::invalid_argument("input qubit count does not match layout");
    std::vector<cdouble> amps = input.amplitudes();
    for (const GateInstance& g : flatten(layout)) {
        const double t = g.param_index >= 0
                             ? theta[static_cast<std::size_t>(g.param_index)]
                             : 0.0;
        detail::apply_instance(amps, layout.num_qubits, g, t);
    }
    StateVector out(layout.num_qubits);
    out.amplitudes() = std::move(amps);
    return out;
}

// Marginals over the measured qubits with bitstrings >= C masked out and
// the surviving C entries renormalized.
inline std::vector<double> mask_and_renormalize(const std::vector<double>& marginals,
                                                int class_count) {
    std::vector<double> probs(static_cast<std::size_t>(class_count));
    double total = 0.0;
    for (int c = 0; c < class_count; ++c) {
        probs[static_cast<std::size_t>(c)] = marginals[static_cast<std::size_t>(c)];
        total += marginals[static_cast<std::size_t>(c)];
    }
    if (total <= 1e-12)
        throw std::runtime_error("all probability mass on masked bitstrings");
    for (double& p : probs) p /= total;
    return probs;
}

// Class-probability output of the model for one encoded sample.
inline std::vector<double> forward(const VqcnnLayout& layout,
                                   const std::vector<double>& theta,
                                   const StateVector& input) {
    const StateVector out = run_circuit(layout, theta, input);
    return mask_and_renormalize(marginal_probabilities(out, layout.measured),
                                layout.class_count);
}

// argmax with ties broken toward the smallest class index
inline int predict(const std::vector<double>& probs) {
    if (probs.empty()) throw std::invalid_argument("predict: empty probability vector");
    std::size_t best = 0;
    for (std::size_t c = 1; c < probs.size(); ++c)
        if (probs[c] > probs[best]) best = c;
    return static_cast<int>(best);
}

// A layout plus its trained angles.
struct Model {
    VqcnnLayout layout;
    std::vector<double> theta;
};

inline void save_model(std::ostream& os, const Model& model) {
    os << "num_qubits " << model.layout.num_qubits << "\n";
    os << "class_count " << model.layout.class_count << "\n";
    os << "num_layers " << model.layout.num_layers() << "\n";
    os << "gate_indices ";
    const auto& gates = model.layout.u_structure.gates;
    for (std::size_t i = 0; i < gates.size(); ++i)
        os << (i ? "," : "") << gates[i];
    os << "\n";
    os << "parameters";
    os.precision(17);
    for (double t : model.theta) os << " " << t;
    os << "\n";
}

inline Model load_model(std::istream& is) {
    int num_qubits = 0, class_count = 0, num_layers = 0;
    std::vector<int> gates;
    std::vector<double> theta;
    std::string key;
    while (is >> key) {
        if (key == "num_qubits") {
            is >> num_qubits;
        } else if (key == "class_count") {
            is >> class_count;
        } else if (key == "num_layers") {
            is >> num_layers;
        } else if (key == "gate_indices") {
            std::string list;
            is >> list;
            std::stringstream ss(list);
            std::string tok;
            while (std::getline(ss, tok, ',')) gates.push_back(std::stoi(tok));
        } else if (key == "parameters") {
            double v;
            while (is >> v) theta.push_back(v);
        } else {
            throw std::runtime_error("model file: unknown field '" + key + "'");
        }
    }
    if (num_qubits == 0 || class_count == 0 || gates.empty())
        throw std::runtime_error("model file: missing fields");
    Model model;
    model.layout = build_layout(num_qubits, class_count, UStructure{gates});
    if (model.layout.num_layers() != num_layers)
        throw std::runtime_error("model file: inconsistent num_layers");
    check_theta(model.layout, theta);
    model.theta = std::move(theta);
    return model;
}

}  // namespace vqcnn

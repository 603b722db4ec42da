#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vqcnn/circuit.hpp"
#include "vqcnn/complexity.hpp"
#include "vqcnn/data.hpp"
#include "vqcnn/pso.hpp"
#include "vqcnn/train.hpp"

namespace vqcnn {

struct ClientSpec {
    int client_id = 0;  // ids are 1-based and contiguous
    Dataset dataset;
    ComplexityReport complexity;
    SearchResult search;
    VqcnnLayout layout;
};

struct ClientReport {
    int client_id = 0;
    double accuracy = 0.0;
    std::vector<std::vector<double>> soft_labels;  // public-set rows, length C
};

struct FusionMatrix {
    std::vector<std::vector<double>> mp;
};

enum class MessageDirection { Up, Down };
enum class MessageKind { Report, Structure, GlobalModel };

struct Message {
    MessageDirection direction;
    std::string sender;
    std::string receiver;
    MessageKind kind;
    std::size_t payload_size;  // element count
};

struct FederationTranscript {
    std::vector<Message> messages;

    std::size_t upward_elements() const {
        std::size_t total = 0;
        for (const Message& m : messages)
            if (m.direction == MessageDirection::Up) total += m.payload_size;
        return total;
    }
    std::size_t downward_elements() const {
        std::size_t total = 0;
        for (const Message& m : messages)
            if (m.direction == MessageDirection::Down) total += m.payload_size;
        return total;
    }
};

inline const char* to_string(MessageDirection d) {
    return d == MessageDirection::Up ? "up" : "down";
}

inline const char* to_string(MessageKind k) {
    switch (k) {
        case MessageKind::Report: return "report";
        case MessageKind::Structure: return "structure";
        case MessageKind::GlobalModel: return "global_model";
    }
    return "?";
}

// One message per line: direction sender receiver kind payload_size
inline void write_transcript(std::ostream& os, const FederationTranscript& t) {
    os << "direction\tsender\treceiver\tkind\tpayload_size\n";
    for (const Message& m : t.messages)
        os << to_string(m.direction) << "\t" << m.sender << "\t" << m.receiver
           << "\t" << to_string(m.kind) << "\t" << m.payload_size << "\n";
}

struct FederationConfig {
    int num_qubits = 0;
    int class_count = 0;
    double lambda = 0.7;
    std::uint64_t rng_seed = 0;
    ComplexityConfig complexity;
    PsoConfig pso;           // per-client structure search (seed derived per client)
    TrainConfig distill;     // server-side distillation optimizer
};

// ----- Client side -----

inline ClientSpec client_build(int client_id, const Dataset& dataset,
                               const FederationConfig& cfg) {
    if (dataset.size() == 0)
        throw std::invalid_argument("client_build: empty dataset");
    ClientSpec spec;
    spec.client_id = client_id;
    spec.dataset = dataset;
    spec.complexity =
        assess_complexity(dataset.labels, dataset.dimension(), cfg.complexity);
    PsoConfig pso = cfg.pso;
    pso.rng_seed = derive_seed(cfg.rng_seed, 0xc11e27u,
                               static_cast<std::uint64_t>(client_id));
    spec.search = search(dataset, spec.complexity.gate_count, cfg.num_qubits,
                         cfg.class_count, pso);
    spec.layout =
        build_layout(cfg.num_qubits, cfg.class_count, spec.search.gbest_structure);
    return spec;
}

inline ClientReport client_infer_public(const ClientSpec& spec,
                                        const Dataset& public_set) {
    if (public_set.dimension() != spec.dataset.dimension())
        throw std::invalid_argument("client_infer_public: dimension mismatch");
    ClientReport report;
    report.client_id = spec.client_id;
    std::size_t correct = 0;
    for (std::size_t k = 0; k < public_set.size(); ++k) {
        std::vector<double> probs =
            forward(spec.layout, spec.search.gbest_theta,
                    amplitude_encode(public_set.features[k]));
        if (predict(probs) == public_set.labels[k]) ++correct;
        report.soft_labels.push_back(std::move(probs));
    }
    report.accuracy =
        static_cast<double>(correct) / static_cast<double>(public_set.size());
    return report;
}

// ----- Server side -----

inline int select_student(const std::vector<ClientReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("select_student: no reports");
    const ClientReport* best = &reports.front();
    for (const ClientReport& r : reports)
        if (r.accuracy > best->accuracy ||
            (r.accuracy == best->accuracy && r.client_id < best->client_id))
            best = &r;
    return best->client_id;
}

// Accuracy-weighted convex combination of the non-student reports.
inline FusionMatrix fuse_soft_labels(const std::vector<ClientReport>& reports,
                                     int student_id) {
    double weight_total = 0.0;
    std::size_t rows = 0, cols = 0;
    bool any_teacher = false;
    for (const ClientReport& r : reports) {
        if (r.client_id == student_id) continue;
        any_teacher = true;
        weight_total += r.accuracy;
        rows = r.soft_labels.size();
        if (rows) cols = r.soft_labels[0].size();
    }
    if (!any_teacher)
        throw std::invalid_argument("fuse_soft_labels: no non-student reports");
    if (weight_total <= 0.0)
        throw std::invalid_argument("fuse_soft_labels: all teacher accuracies zero");
    FusionMatrix fusion;
    fusion.mp.assign(rows, std::vector<double>(cols, 0.0));
    for (const ClientReport& r : reports) {
        if (r.client_id == student_id) continue;
        const double w = r.accuracy / weight_total;
        for (std::size_t k = 0; k < rows; ++k)
            for (std::size_t c = 0; c < cols; ++c)
                fusion.mp[k][c] += w * r.soft_labels[k][c];
    }
    return fusion;
}

// lambda * KL(mp || student) + (1 - lambda) * CE(student, hard label)
inline double kd_loss(const std::vector<double>& mp_row,
                      const std::vector<double>& student_row, int hard_label,
                      double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("kd_loss: lambda must be in [0, 1]");
    if (mp_row.size() != student_row.size())
        throw std::invalid_argument("kd_loss: row length mismatch");
    if (hard_label < 0 || static_cast<std::size_t>(hard_label) >= student_row.size())
        throw std::invalid_argument("kd_loss: label out of range");
    double kl = 0.0;
    for (std::size_t c = 0; c < mp_row.size(); ++c) {
        if (mp_row[c] <= 0.0) continue;  // 0 log 0 term
        kl += mp_row[c] * std::log(std::max(mp_row[c], kProbFloor) /
                                   std::max(student_row[c], kProbFloor));
    }
    const double ce =
        -std::log(std::max(student_row[static_cast<std::size_t>(hard_label)],
                           kProbFloor));
    return lambda * kl + (1.0 - lambda) * ce;
}

namespace detail {

inline std::vector<double> kd_dprobs(const std::vector<double>& mp_row,
                                     const std::vector<double>& student_row,
                                     int hard_label, double lambda) {
    std::vector<double> d(student_row.size(), 0.0);
    for (std::size_t c = 0; c < student_row.size(); ++c) {
        if (student_row[c] < kProbFloor) continue;  // inside the floor, flat
        if (mp_row[c] > 0.0) d[c] -= lambda * mp_row[c] / student_row[c];
        if (static_cast<int>(c) == hard_label)
            d[c] -= (1.0 - lambda) / student_row[c];
    }
    return d;
}

}  // namespace detail

// Minibatch gradient descent on the mean distillation loss over the public
// set, warm-started from the supplied parameters. iterations = 0 returns
// the initial parameters untouched.
inline std::pair<std::vector<double>, TrainHistory> distill(
    const VqcnnLayout& layout, std::vector<double> theta,
    const Dataset& public_set, const FusionMatrix& fusion, double lambda,
    const TrainConfig& cfg) {
    check_theta(layout, theta);
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("distill: lambda must be in [0, 1]");
    if (fusion.mp.size() != public_set.size())
        throw std::invalid_argument("distill: fusion rows do not match public set");
    if (cfg.learning_rate < 0.0 || cfg.batch_size < 1 || cfg.iterations < 0)
        throw std::invalid_argument("distill: bad optimizer config");

    const std::vector<GateInstance> seq = flatten(layout);
    std::vector<StateVector> encoded;
    encoded.reserve(public_set.size());
    for (const auto& row : public_set.features)
        encoded.push_back(amplitude_encode(row));

    const std::size_t batch = std::min<std::size_t>(
        static_cast<std::size_t>(cfg.batch_size), public_set.size());
    Rng rng(cfg.rng_seed);
    std::vector<std::size_t> order(public_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainHistory history;
    for (int it = 0; it < cfg.iterations; ++it) {
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
            loss += kd_loss(fusion.mp[i], trace.probs, public_set.labels[i], lambda);
            const std::vector<double> g = detail::backward(
                layout, seq, theta, trace,
                detail::kd_dprobs(fusion.mp[i], trace.probs, public_set.labels[i],
                                  lambda));
            for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += g[p];
        }
        const double inv = 1.0 / static_cast<double>(batch);
        history.loss.push_back(loss * inv);
        for (std::size_t p = 0; p < theta.size(); ++p)
            theta[p] -= cfg.learning_rate * grad[p] * inv;
    }
    history.final_accuracy = evaluate(layout, theta, public_set);
    return {std::move(theta), std::move(history)};
}

// ----- Whole protocol -----

struct FederationMetrics {
    std::vector<double> client_test_accuracy;
    double mean_client_accuracy = 0.0;
    double global_accuracy = 0.0;
    double hard_label_accuracy = 0.0;  // lambda = 0 baseline, trained identically
    std::size_t upward_elements = 0;
    std::size_t downward_elements = 0;
    std::vector<std::size_t> client_train_sizes;
    std::size_t public_size = 0;
};

struct FederationResult {
    Model global_model;
    Model hard_label_baseline;
    FederationTranscript transcript;
    FederationMetrics metrics;
    std::vector<ClientSpec> clients;
    std::vector<ClientReport> reports;
    int student_id = 0;
};

inline void write_metrics(std::ostream& os, const FederationMetrics& m,
                          double lambda) {
    os << "model\tlabels\ttrain_size\taccuracy\n";
    os.precision(6);
    std::size_t lo = m.client_train_sizes.empty()
                         ? 0
                         : *std::min_element(m.client_train_sizes.begin(),
                                             m.client_train_sizes.end());
    std::size_t hi = m.client_train_sizes.empty()
                         ? 0
                         : *std::max_element(m.client_train_sizes.begin(),
                                             m.client_train_sizes.end());
    os << "Client Model (mean)\tHard Labels\t" << lo << "~" << hi << "\t"
       << m.mean_client_accuracy << "\n";
    const char* model_name = lambda == 0.0   ? "Hard-Label Baseline"
                             : lambda == 1.0 ? "Global Model (KL)"
                                             : "Global Model (KL+CE)";
    const char* label_kind = lambda == 0.0   ? "Hard Labels"
                             : lambda == 1.0 ? "Soft Labels"
                                             : "Soft + Hard Labels";
    os << model_name << "\t" << label_kind << "\t" << m.public_size << "\t"
       << m.global_accuracy << "\n";
    if (lambda != 0.0)
        os << "Hard-Label Baseline\tHard Labels\t" << m.public_size << "\t"
           << m.hard_label_accuracy << "\n";
}

// One-shot protocol: build -> infer -> select -> fuse -> distill -> broadcast.
inline FederationResult run_federation(const std::vector<Dataset>& client_datasets,
                                       const Dataset& public_set,
                                       const Dataset& test_set,
                                       const FederationConfig& cfg) {
    if (client_datasets.empty())
        throw std::invalid_argument("run_federation: no clients");
    const std::size_t dim = client_datasets.front().dimension();
    std::size_t min_client = client_datasets.front().size();
    for (const Dataset& d : client_datasets) {
        if (d.dimension() != dim || public_set.dimension() != dim ||
            test_set.dimension() != dim)
            throw std::invalid_argument("run_federation: feature dimensions differ");
        min_client = std::min(min_client, d.size());
    }
    if (public_set.size() > min_client)
        std::cerr << "warning: public set larger than the smallest client dataset\n";

    const int m = static_cast<int>(client_datasets.size());
    FederationResult result;

    for (int i = 1; i <= m; ++i)
        result.clients.push_back(
            client_build(i, client_datasets[static_cast<std::size_t>(i - 1)], cfg));

    const std::size_t classes = static_cast<std::size_t>(cfg.class_count);
    for (const ClientSpec& spec : result.clients) {
        result.reports.push_back(client_infer_public(spec, public_set));
        result.transcript.messages.push_back(
            {MessageDirection::Up, "client_" + std::to_string(spec.client_id),
             "server", MessageKind::Report, public_set.size() * classes + 1});
    }

    result.student_id = select_student(result.reports);
    const ClientSpec& student =
        result.clients[static_cast<std::size_t>(result.student_id - 1)];
    result.transcript.messages.push_back(
        {MessageDirection::Up, "client_" + std::to_string(result.student_id),
         "server", MessageKind::Structure,
         student.search.gbest_structure.gates.size()});

    const FusionMatrix fusion = fuse_soft_labels(result.reports, result.student_id);

    TrainConfig distill_cfg = cfg.distill;
    distill_cfg.rng_seed = derive_seed(cfg.rng_seed, 0xd157111u);
    auto [global_theta, global_hist] =
        distill(student.layout, student.search.gbest_theta, public_set, fusion,
                cfg.lambda, distill_cfg);
    auto [baseline_theta, baseline_hist] =
        distill(student.layout, student.search.gbest_theta, public_set, fusion,
                0.0, distill_cfg);
    (void)global_hist;
    (void)baseline_hist;
    result.global_model = {student.layout, std::move(global_theta)};
    result.hard_label_baseline = {student.layout, std::move(baseline_theta)};

    const std::size_t model_elements =
        student.search.gbest_structure.gates.size() +
        result.global_model.theta.size();
    for (int i = 1; i <= m; ++i)
        result.transcript.messages.push_back(
            {MessageDirection::Down, "server", "client_" + std::to_string(i),
             MessageKind::GlobalModel, model_elements});

    FederationMetrics& metrics = result.metrics;
    for (const ClientSpec& spec : result.clients) {
        metrics.client_test_accuracy.push_back(
            evaluate(spec.layout, spec.search.gbest_theta, test_set));
        metrics.client_train_sizes.push_back(spec.dataset.size());
    }
    metrics.mean_client_accuracy =
        std::accumulate(metrics.client_test_accuracy.begin(),
                        metrics.client_test_accuracy.end(), 0.0) /
        static_cast<double>(m);
    metrics.global_accuracy =
        evaluate(result.global_model.layout, result.global_model.theta, test_set);
    metrics.hard_label_accuracy =
        evaluate(result.hard_label_baseline.layout,
                 result.hard_label_baseline.theta, test_set);
    metrics.upward_elements = result.transcript.upward_elements();
    metrics.downward_elements = result.transcript.downward_elements();
    metrics.public_size = public_set.size();
    return result;
}

}  // namespace vqcnn

#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vqcnn/complexity.hpp"
#include "vqcnn/data.hpp"
#include "vqcnn/encode.hpp"
#include "vqcnn/federation.hpp"
#include "vqcnn/pso.hpp"
#include "vqcnn/train.hpp"

namespace vqcnn {

// Flat "key = value" configuration with dotted section prefixes.
// '#' starts a comment; blank lines are ignored.
class ConfigMap {
public:
    static ConfigMap parse(std::istream& is) {
        ConfigMap cfg;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const std::size_t eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": expected 'key = value'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static ConfigMap load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open config file: " + path);
        return parse(f);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    void set(const std::string& key, const std::string& value) {
        values_[key] = value;
    }

    std::string get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end())
            throw std::runtime_error("config: missing key '" + key + "'");
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        auto it = values_.find(key);
        return it == values_.end() ? dflt : it->second;
    }

    double get_double(const std::string& key) const {
        return to_double(key, get_string(key));
    }
    double get_double(const std::string& key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }

    long long get_int(const std::string& key) const {
        const std::string v = get_string(key);
        try {
            std::size_t pos = 0;
            const long long r = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key +
                                     "' is not an integer: " + v);
        }
    }
    long long get_int(const std::string& key, long long dflt) const {
        return has(key) ? get_int(key) : dflt;
    }

    std::uint64_t get_seed(const std::string& key, std::uint64_t dflt) const {
        return has(key) ? static_cast<std::uint64_t>(get_int(key)) : dflt;
    }

    // "0:500,1:500" -> {(0,500), (1,500)}
    std::vector<std::pair<int, int>> get_class_counts(const std::string& key) const {
        const std::string v = get_string(key);
        std::vector<std::pair<int, int>> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::size_t colon = item.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("config: key '" + key +
                                         "' wants class:count pairs");
            out.emplace_back(std::stoi(trim(item.substr(0, colon))),
                             std::stoi(trim(item.substr(colon + 1))));
        }
        if (out.empty())
            throw std::runtime_error("config: key '" + key + "' is empty");
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const char* ws = " \t\r\n";
        const std::size_t a = s.find_first_not_of(ws);
        if (a == std::string::npos) return "";
        const std::size_t b = s.find_last_not_of(ws);
        return s.substr(a, b - a + 1);
    }

    double to_double(const std::string& key, const std::string& v) const {
        try {
            std::size_t pos = 0;
            const double r = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key +
                                     "' is not a number: " + v);
        }
    }

    std::map<std::string, std::string> values_;
};

// Fully materialized experiment: datasets plus all module configs.
struct Scenario {
    std::vector<Dataset> client_datasets;
    Dataset public_set;
    Dataset test_set;
    FederationConfig federation;
    int num_classes = 0;
};

namespace detail {

inline std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f),
                                     std::istreambuf_iterator<char>());
}

inline Dataset mnist_dataset(const std::string& images_path,
                             const std::string& labels_path, std::size_t side) {
    const IdxImages imgs = read_idx_images(read_binary_file(images_path));
    const std::vector<int> labels = read_idx_labels(read_binary_file(labels_path));
    if (imgs.count != labels.size())
        throw std::runtime_error("mnist: image/label count mismatch");
    Dataset d;
    for (std::size_t i = 0; i < imgs.count; ++i) {
        std::vector<double> img(imgs.image(i), imgs.image(i) + imgs.rows * imgs.cols);
        d.push(bilinear_downsample(img, imgs.rows, imgs.cols, side, side),
               labels[i]);
    }
    return d;
}

}  // namespace detail

inline Scenario load_scenario(const ConfigMap& cfg) {
    Scenario sc;
    const std::uint64_t seed = cfg.get_seed("seed", 0);
    const std::string source = cfg.get_string("data.source");

    Dataset train_pool, eval_pool;
    if (source == "blobs") {
        const int classes = static_cast<int>(cfg.get_int("blobs.classes"));
        const int dim = static_cast<int>(cfg.get_int("blobs.dimension"));
        const double sep = cfg.get_double("blobs.separation", 3.0);
        const int train_pc = static_cast<int>(cfg.get_int("blobs.train_per_class"));
        const int eval_pc = static_cast<int>(cfg.get_int("blobs.eval_per_class"));
        train_pool = synthetic_blobs(classes, train_pc, dim, sep,
                                     derive_seed(seed, 0x72a17u));
        eval_pool = synthetic_blobs(classes, eval_pc, dim, sep,
                                    derive_seed(seed, 0xe7a1u));
        sc.num_classes = classes;
    } else if (source == "mnist") {
        const std::size_t side =
            static_cast<std::size_t>(cfg.get_int("mnist.downsample", 16));
        train_pool = detail::mnist_dataset(cfg.get_string("mnist.train_images"),
                                           cfg.get_string("mnist.train_labels"), side);
        eval_pool = detail::mnist_dataset(cfg.get_string("mnist.test_images"),
                                          cfg.get_string("mnist.test_labels"), side);
        sc.num_classes = static_cast<int>(cfg.get_int("classes", 10));
    } else {
        throw std::runtime_error("config: data.source must be 'blobs' or 'mnist'");
    }

    // client splits from (class, count) triples
    const int m = static_cast<int>(cfg.get_int("clients.count"));
    if (m < 1) throw std::runtime_error("config: clients.count must be >= 1");
    PartitionPlan plan;
    plan.rng_seed = derive_seed(seed, 0x5911u);
    for (int i = 1; i <= m; ++i)
        plan.clients.push_back(
            cfg.get_class_counts("client." + std::to_string(i)));
    sc.client_datasets = partition(train_pool, plan);

    // public and evaluation sets drawn disjointly from the eval pool
    const int public_pc = static_cast<int>(cfg.get_int("public.per_class"));
    const int test_pc = static_cast<int>(cfg.get_int("test.per_class"));
    PartitionPlan eval_plan;
    eval_plan.rng_seed = derive_seed(seed, 0xe7a15u);
    std::vector<std::pair<int, int>> pub_req, test_req;
    for (int c = 0; c < sc.num_classes; ++c) {
        pub_req.emplace_back(c, public_pc);
        test_req.emplace_back(c, test_pc);
    }
    eval_plan.clients = {pub_req, test_req};
    std::vector<Dataset> eval_split = partition(eval_pool, eval_plan);
    sc.public_set = std::move(eval_split[0]);
    sc.test_set = std::move(eval_split[1]);

    // module configs
    FederationConfig& fed = sc.federation;
    fed.class_count = sc.num_classes;
    fed.num_qubits = std::max(1, ceil_log2(sc.public_set.dimension()));
    fed.lambda = cfg.get_double("lambda", 0.7);
    fed.rng_seed = seed;

    ComplexityConfig& cc = fed.complexity;
    cc.alpha1 = cfg.get_double("complexity.alpha1", cc.alpha1);
    cc.alpha2 = cfg.get_double("complexity.alpha2", cc.alpha2);
    cc.alpha3 = cfg.get_double("complexity.alpha3", cc.alpha3);
    cc.t1 = cfg.get_double("complexity.t1", cc.t1);
    cc.t2 = cfg.get_double("complexity.t2", cc.t2);
    cc.t3 = cfg.get_double("complexity.t3", cc.t3);
    cc.m_ref = cfg.get_double("complexity.m_ref", cc.m_ref);
    cc.d_ref = cfg.get_double("complexity.d_ref", cc.d_ref);
    cc.gate_min = static_cast<int>(cfg.get_int("complexity.gate_min", cc.gate_min));
    cc.gate_max = static_cast<int>(cfg.get_int("complexity.gate_max", cc.gate_max));
    cc.validate();

    PsoConfig& pso = fed.pso;
    pso.swarm_size = static_cast<int>(cfg.get_int("pso.swarm_size", pso.swarm_size));
    pso.iterations = static_cast<int>(cfg.get_int("pso.iterations", pso.iterations));
    pso.inertia = cfg.get_double("pso.inertia", pso.inertia);
    pso.cognitive = cfg.get_double("pso.cognitive", pso.cognitive);
    pso.social = cfg.get_double("pso.social", pso.social);
    pso.velocity_clamp = cfg.get_double("pso.velocity_clamp", pso.velocity_clamp);

    TrainConfig& tr = pso.inner;
    tr.learning_rate = cfg.get_double("train.learning_rate", tr.learning_rate);
    tr.batch_size = static_cast<int>(cfg.get_int("train.batch_size", tr.batch_size));
    tr.iterations = static_cast<int>(cfg.get_int("train.iterations", tr.iterations));
    tr.gradient_step = cfg.get_double("train.gradient_step", tr.gradient_step);
    tr.validate();

    TrainConfig& di = fed.distill;
    di = tr;
    di.learning_rate = cfg.get_double("distill.learning_rate", tr.learning_rate);
    di.batch_size = static_cast<int>(cfg.get_int("distill.batch_size", tr.batch_size));
    di.iterations = static_cast<int>(cfg.get_int("distill.iterations", tr.iterations));
    di.validate();

    pso.validate();
    return sc;
}

}  // namespace vqcnn

// Command-line driver for the federated VQCNN pipeline: gate-budget
// estimation, per-client structure search, one-shot federation, and model
// evaluation. One config file defines the whole scenario; flags only pick
// the command and override seed/paths.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vqcnn/config.hpp"
#include "vqcnn/federation.hpp"

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

vqcnn::ConfigMap load_config(const std::string& path, bool seed_set,
                             long long seed) {
    vqcnn::ConfigMap cfg = [&] {
        try {
            return vqcnn::ConfigMap::load(path);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }();
    if (seed_set) cfg.set("seed", std::to_string(seed));
    return cfg;
}

vqcnn::Scenario build_scenario(const vqcnn::ConfigMap& cfg) {
    try {
        return vqcnn::load_scenario(cfg);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& writer) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    writer(f);
}

int cmd_estimate(const vqcnn::Scenario& sc) {
    std::cout << "client\tM\tD\ts\ts_prime\tQ\tgates\n";
    std::cout.precision(6);
    for (std::size_t i = 0; i < sc.client_datasets.size(); ++i) {
        const vqcnn::Dataset& d = sc.client_datasets[i];
        const vqcnn::ComplexityReport r = vqcnn::assess_complexity(
            d.labels, d.dimension(), sc.federation.complexity);
        std::cout << (i + 1) << "\t" << d.size() << "\t" << d.dimension() << "\t"
                  << r.sparsity << "\t" << r.dispersion << "\t" << r.q_score
                  << "\t" << r.gate_count << "\n";
    }
    return 0;
}

int cmd_search(const vqcnn::Scenario& sc, int client_id,
               const std::filesystem::path& out_dir) {
    if (client_id < 1 ||
        static_cast<std::size_t>(client_id) > sc.client_datasets.size())
        throw ConfigError("unknown client id " + std::to_string(client_id));
    const vqcnn::ClientSpec spec = vqcnn::client_build(
        client_id, sc.client_datasets[static_cast<std::size_t>(client_id - 1)],
        sc.federation);

    std::filesystem::create_directories(out_dir);
    const std::string stem = "client_" + std::to_string(client_id);
    write_file(out_dir / (stem + ".model"), [&](std::ostream& os) {
        vqcnn::save_model(os, {spec.layout, spec.search.gbest_theta});
    });
    write_file(out_dir / (stem + "_trace.tsv"), [&](std::ostream& os) {
        vqcnn::write_trace(os, spec.search);
    });
    std::cout.precision(6);
    std::cout << "client " << client_id << ": gates=" << spec.complexity.gate_count
              << " gbest_score=" << spec.search.gbest_score << "\n";
    return 0;
}

int cmd_federate(const vqcnn::Scenario& sc, const std::filesystem::path& out_dir) {
    const vqcnn::FederationResult result = vqcnn::run_federation(
        sc.client_datasets, sc.public_set, sc.test_set, sc.federation);

    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "global.model", [&](std::ostream& os) {
        vqcnn::save_model(os, result.global_model);
    });
    write_file(out_dir / "transcript.tsv", [&](std::ostream& os) {
        vqcnn::write_transcript(os, result.transcript);
    });
    write_file(out_dir / "metrics.tsv", [&](std::ostream& os) {
        vqcnn::write_metrics(os, result.metrics, sc.federation.lambda);
    });
    vqcnn::write_metrics(std::cout, result.metrics, sc.federation.lambda);
    return 0;
}

int cmd_evaluate(const vqcnn::Scenario& sc, const std::string& model_path,
                 const std::string& which) {
    std::ifstream f(model_path);
    if (!f) throw ConfigError("cannot open model file: " + model_path);
    const vqcnn::Model model = vqcnn::load_model(f);

    const vqcnn::Dataset* data = nullptr;
    if (which == "test") {
        data = &sc.test_set;
    } else if (which == "public") {
        data = &sc.public_set;
    } else if (which.rfind("client:", 0) == 0) {
        const std::size_t id = std::stoul(which.substr(7));
        if (id < 1 || id > sc.client_datasets.size())
            throw ConfigError("unknown client id in --dataset");
        data = &sc.client_datasets[id - 1];
    } else {
        throw ConfigError("--dataset must be test, public, or client:<id>");
    }
    if (data->size() == 0) throw ConfigError("selected dataset is empty");

    const double acc = vqcnn::evaluate(model.layout, model.theta, *data);
    std::cout << std::fixed << std::setprecision(4) << acc << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated variational quantum CNN toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string model_path;
    std::string dataset_spec = "test";
    int client_id = 0;
    long long seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "scenario config file")->required();
        sub->add_option("--seed", seed, "override the scenario seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--out", out_dir, "output directory");
    };

    CLI::App* estimate = app.add_subcommand(
        "estimate", "print per-client complexity and gate budgets");
    add_common(estimate);

    CLI::App* search = app.add_subcommand(
        "search", "swarm-search and train one client's circuit");
    add_common(search);
    search->add_option("--client", client_id, "client id (1-based)")->required();

    CLI::App* train = app.add_subcommand(
        "train", "alias of search: structure search includes training");
    add_common(train);
    train->add_option("--client", client_id, "client id (1-based)")->required();

    CLI::App* federate =
        app.add_subcommand("federate", "run the one-shot federation protocol");
    add_common(federate);

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "accuracy of a saved model on a dataset");
    add_common(evaluate);
    evaluate->add_option("--model", model_path, "model file")->required();
    evaluate->add_option("--dataset", dataset_spec,
                         "test | public | client:<id>");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        const vqcnn::ConfigMap cfg = load_config(config_path, seed_set, seed);
        const vqcnn::Scenario sc = build_scenario(cfg);
        if (estimate->parsed()) return cmd_estimate(sc);
        if (search->parsed() || train->parsed())
            return cmd_search(sc, client_id, out_dir);
        if (federate->parsed()) return cmd_federate(sc, out_dir);
        if (evaluate->parsed()) return cmd_evaluate(sc, model_path, dataset_spec);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

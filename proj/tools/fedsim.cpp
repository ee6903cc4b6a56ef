// fedsim: deterministic single-process federated-learning simulator.
// Runs FedAvg, RingFed, FedProx, or SCAFFOLD over IDX datasets and writes
// per-round metrics with communication-cost accounting.

#include "ringfed/config.hpp"
#include "ringfed/errors.hpp"
#include "ringfed/metrics.hpp"
#include "ringfed/orchestrator.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using ringfed::KeyValues;

struct FlagCapture {
    std::map<std::string, std::string> values;

    // Registers a config key as a string option so presence is detectable
    // (file < flag precedence needs to know which flags were given).
    void add(CLI::App& app, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(
            "--" + key, [this, key](const std::string& v) { values[key] = v; }, help);
    }

    KeyValues overrides() const { return {values.begin(), values.end()}; }
};

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    while (begin <= csv.size()) {
        const std::size_t comma = csv.find(',', begin);
        if (comma == std::string::npos) {
            out.push_back(csv.substr(begin));
            break;
        }
        out.push_back(csv.substr(begin, comma - begin));
        begin = comma + 1;
    }
    return out;
}

void print_echo(const ringfed::RunConfig& cfg) {
    std::cout << "resolved config:\n";
    for (const auto& [key, value] : ringfed::config_echo(cfg)) {
        std::cout << "  " << key << " = " << value << "\n";
    }
}

void print_summary(const ringfed::Summary& s) {
    std::cout << "summary: max_accuracy=" << s.max_accuracy;
    if (s.rounds_to_target) {
        std::cout << " rounds_to_" << s.target_accuracy << "=" << *s.rounds_to_target;
    } else {
        std::cout << " rounds_to_" << s.target_accuracy << "=never";
    }
    std::cout << " tail_mean=" << s.tail.mean << " tail_stdev=" << s.tail.stdev << " (W="
              << s.tail_window << ")\n";
}

int run_single(const ringfed::RunConfig& cfg, const std::string& out, const std::string& format) {
    print_echo(cfg);
    const ringfed::MetricsLog log = ringfed::run_experiment(cfg);
    const ringfed::Summary summary = ringfed::summarize(log, cfg.target_accuracy, cfg.tail_window);

    const ringfed::MetricsRecord& last = log.back();
    std::cout << "final round " << last.round << ": accuracy=" << last.test_accuracy
              << " loss=" << last.test_loss << " uplink=" << last.uplink_units
              << " downlink=" << last.downlink_units << " peer=" << last.peer_units << "\n";
    print_summary(summary);

    if (!out.empty()) {
        if (format == "csv" || format == "both") {
            ringfed::emit_csv(log, out + ".csv");
            std::cout << "wrote " << out << ".csv\n";
        }
        if (format == "json" || format == "both") {
            ringfed::emit_json(log, summary, ringfed::config_echo(cfg), out + ".json");
            std::cout << "wrote " << out << ".json\n";
        }
    }
    return 0;
}

int run_sweep_mode(const ringfed::RunConfig& base, const std::vector<std::string>& sweep_args,
                   const std::string& out_dir, int parallel) {
    ringfed::SweepSpec spec;
    spec.base = base;
    for (const std::string& arg : sweep_args) {
        const std::size_t eq = arg.find('=');
        if (eq == std::string::npos) {
            throw ringfed::ConfigError("--sweep expects key=v1,v2,... got '" + arg + "'");
        }
        spec.grid.emplace_back(arg.substr(0, eq), split_csv(arg.substr(eq + 1)));
    }

    const auto points = ringfed::expand_sweep(spec);
    std::cout << "sweep: " << points.size() << " grid points\n";

    ringfed::Dataset train = ringfed::load_idx(base.train_images, base.train_labels);
    if (base.train_limit > 0) train = train.head(base.train_limit);
    const ringfed::Dataset test = ringfed::load_idx(base.test_images, base.test_labels);

    const ringfed::SweepReport report =
        ringfed::run_sweep(spec, train, test, out_dir, parallel);

    std::cout << "run,status,assignment,rounds_to_target,max_accuracy,tail_mean,tail_stdev\n";
    for (const auto& result : report.runs) {
        std::cout << result.point.index << ",";
        if (!result.ok) {
            std::cout << "failed,\"" << result.error << "\",,,,\n";
            continue;
        }
        std::cout << "ok,\"";
        for (std::size_t i = 0; i < result.point.assignment.size(); ++i) {
            if (i > 0) std::cout << " ";
            std::cout << result.point.assignment[i].first << "="
                      << result.point.assignment[i].second;
        }
        std::cout << "\",";
        if (result.summary.rounds_to_target) {
            std::cout << *result.summary.rounds_to_target;
        }
        std::cout << "," << result.summary.max_accuracy << "," << result.summary.tail.mean << ","
                  << result.summary.tail.stdev << "\n";
    }
    for (const auto& [name, index] : report.best_by_algorithm) {
        std::cout << "best[" << name << "]: run " << index
                  << " tail_mean=" << report.runs[index].summary.tail.mean << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedsim: deterministic federated-learning simulator"};

    std::string config_path;
    std::string out;
    std::string out_dir = "sweep_out";
    std::string format = "both";
    int parallel = 1;
    std::vector<std::string> sweep_args;

    app.add_option("--config", config_path, "key = value config file; flags override it");
    app.add_option("--out", out, "report base path; writes <out>.csv / <out>.json");
    app.add_option("--out-dir", out_dir, "sweep output directory");
    app.add_option("--format", format, "report format: csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    app.add_option("--parallel", parallel, "sweep runs in flight")->check(CLI::PositiveNumber);
    app.add_option("--sweep", sweep_args,
                   "sweep a key over values, e.g. --sweep lr=1e-4,5e-4,1e-3 (repeatable)");

    FlagCapture flags;
    flags.add(app, "algorithm", "fedavg|ringfed|fedprox|scaffold");
    flags.add(app, "dataset-images", "training images (IDX, .gz ok)");
    flags.add(app, "dataset-labels", "training labels (IDX, .gz ok)");
    flags.add(app, "test-images", "test images (IDX, .gz ok)");
    flags.add(app, "test-labels", "test labels (IDX, .gz ok)");
    flags.add(app, "train-limit", "keep only the first N training examples (0 = all)");
    flags.add(app, "model", "logistic|mlp");
    flags.add(app, "hidden-dim", "MLP hidden width");
    flags.add(app, "clients", "total simulated clients");
    flags.add(app, "select-frac", "fraction of clients selected per round, in (0,1]");
    flags.add(app, "rounds", "communication rounds T");
    flags.add(app, "epochs", "local epochs E per period");
    flags.add(app, "periods", "RingFed periods P per round (P-1 exchanges)");
    flags.add(app, "gamma", "ring exchange factor in [0,1]");
    flags.add(app, "partition", "iid|pathological|dirichlet");
    flags.add(app, "alpha", "Dirichlet concentration (> 0)");
    flags.add(app, "shards-per-client", "pathological shards per client");
    flags.add(app, "lr", "learning rate");
    flags.add(app, "momentum", "SGD momentum; 1.0 is interpreted as plain SGD");
    flags.add(app, "lr-decay", "per-round learning-rate decay in (0,1]");
    flags.add(app, "batch-size", "minibatch size");
    flags.add(app, "prox-mu", "FedProx proximal weight");
    flags.add(app, "server-lr", "SCAFFOLD server learning rate");
    flags.add(app, "exchange-semantics", "snapshot|sequential ring exchange");
    flags.add(app, "ring-order", "ascending|shuffled ring positions");
    flags.add(app, "weighted-average", "weight aggregation by example counts (true|false)");
    flags.add(app, "final-exchange", "also exchange after the last period (true|false)");
    flags.add(app, "seed", "master seed");
    flags.add(app, "target-accuracy", "accuracy target for rounds-to-target");
    flags.add(app, "tail-window", "window for tail mean/stdev");

    CLI11_PARSE(app, argc, argv);

    try {
        const ringfed::RunConfig cfg = ringfed::resolve_config(config_path, flags.overrides());
        if (!sweep_args.empty()) return run_sweep_mode(cfg, sweep_args, out_dir, parallel);
        return run_single(cfg, out, format);
    } catch (const ringfed::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ringfed::IngestError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 3;
    }
}

#include "ringfed/config.hpp"

#include "ringfed/errors.hpp"
#include "ringfed/rng.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

namespace ringfed {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

int to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected number, got '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected unsigned integer, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(key + ": expected boolean, got '" + value + "'");
}

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

Algorithm parse_algorithm(const std::string& value) {
    if (value == "fedavg") return Algorithm::FedAvg;
    if (value == "ringfed") return Algorithm::RingFed;
    if (value == "fedprox") return Algorithm::FedProx;
    if (value == "scaffold") return Algorithm::Scaffold;
    throw ConfigError("algorithm: expected fedavg|ringfed|fedprox|scaffold, got '" + value + "'");
}

PartitionScheme parse_partition(const std::string& value) {
    if (value == "iid") return PartitionScheme::Iid;
    if (value == "pathological") return PartitionScheme::PathologicalShards;
    if (value == "dirichlet") return PartitionScheme::Dirichlet;
    throw ConfigError("partition: expected iid|pathological|dirichlet, got '" + value + "'");
}

ArchKind parse_model(const std::string& value) {
    if (value == "logistic") return ArchKind::LogisticRegression;
    if (value == "mlp") return ArchKind::Mlp;
    throw ConfigError("model: expected logistic|mlp, got '" + value + "'");
}

ExchangeSemantics parse_semantics(const std::string& value) {
    if (value == "snapshot") return ExchangeSemantics::Snapshot;
    if (value == "sequential") return ExchangeSemantics::Sequential;
    throw ConfigError("exchange-semantics: expected snapshot|sequential, got '" + value + "'");
}

RingOrder parse_ring_order(const std::string& value) {
    if (value == "ascending") return RingOrder::Ascending;
    if (value == "shuffled") return RingOrder::Shuffled;
    throw ConfigError("ring-order: expected ascending|shuffled, got '" + value + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"algorithm", [](RunConfig& c, const std::string&, const std::string& v) { c.algorithm = parse_algorithm(v); }},
        {"dataset-images", [](RunConfig& c, const std::string&, const std::string& v) { c.train_images = v; }},
        {"dataset-labels", [](RunConfig& c, const std::string&, const std::string& v) { c.train_labels = v; }},
        {"test-images", [](RunConfig& c, const std::string&, const std::string& v) { c.test_images = v; }},
        {"test-labels", [](RunConfig& c, const std::string&, const std::string& v) { c.test_labels = v; }},
        {"train-limit", [](RunConfig& c, const std::string& k, const std::string& v) { c.train_limit = to_int(k, v); }},
        {"model", [](RunConfig& c, const std::string&, const std::string& v) { c.model = parse_model(v); }},
        {"hidden-dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.hidden_dim = to_int(k, v); }},
        {"clients", [](RunConfig& c, const std::string& k, const std::string& v) { c.total_clients = to_int(k, v); }},
        {"select-frac", [](RunConfig& c, const std::string& k, const std::string& v) { c.select_frac = to_double(k, v); }},
        {"rounds", [](RunConfig& c, const std::string& k, const std::string& v) { c.rounds = to_int(k, v); }},
        {"epochs", [](RunConfig& c, const std::string& k, const std::string& v) { c.epochs = to_int(k, v); }},
        {"periods", [](RunConfig& c, const std::string& k, const std::string& v) { c.periods = to_int(k, v); }},
        {"gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.gamma = to_double(k, v); }},
        {"partition", [](RunConfig& c, const std::string&, const std::string& v) { c.partition = parse_partition(v); }},
        {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.alpha = to_double(k, v); }},
        {"shards-per-client", [](RunConfig& c, const std::string& k, const std::string& v) { c.shards_per_client = to_int(k, v); }},
        {"lr", [](RunConfig& c, const std::string& k, const std::string& v) { c.lr = to_double(k, v); }},
        {"momentum",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const double m = to_double(k, v);
             c.momentum = (m == 1.0) ? 0.0 : m;  // grid value 1.0 means plain SGD
         }},
        {"lr-decay", [](RunConfig& c, const std::string& k, const std::string& v) { c.lr_decay = to_double(k, v); }},
        {"batch-size", [](RunConfig& c, const std::string& k, const std::string& v) { c.batch_size = to_int(k, v); }},
        {"prox-mu", [](RunConfig& c, const std::string& k, const std::string& v) { c.prox_mu = to_double(k, v); }},
        {"server-lr", [](RunConfig& c, const std::string& k, const std::string& v) { c.server_lr = to_double(k, v); }},
        {"exchange-semantics", [](RunConfig& c, const std::string&, const std::string& v) { c.exchange_semantics = parse_semantics(v); }},
        {"ring-order", [](RunConfig& c, const std::string&, const std::string& v) { c.ring_order = parse_ring_order(v); }},
        {"weighted-average", [](RunConfig& c, const std::string& k, const std::string& v) { c.weighted_average = to_bool(k, v); }},
        {"final-exchange", [](RunConfig& c, const std::string& k, const std::string& v) { c.final_exchange = to_bool(k, v); }},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); }},
        {"target-accuracy", [](RunConfig& c, const std::string& k, const std::string& v) { c.target_accuracy = to_double(k, v); }},
        {"tail-window", [](RunConfig& c, const std::string& k, const std::string& v) { c.tail_window = to_int(k, v); }},
    };
    return table;
}

}  // namespace

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& [name, setter] : setters()) {
        if (name == key) {
            setter(cfg, key, value);
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    KeyValues out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        out.emplace_back(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return out;
}

RunConfig resolve_config(const std::string& config_path, const KeyValues& overrides) {
    RunConfig cfg;
    if (!config_path.empty()) {
        for (const auto& [key, value] : parse_config_file(config_path)) {
            apply_key(cfg, key, value);
        }
    }
    for (const auto& [key, value] : overrides) apply_key(cfg, key, value);
    cfg.validate();
    return cfg;
}

KeyValues config_echo(const RunConfig& cfg) {
    KeyValues echo;
    echo.emplace_back("algorithm", algorithm_name(cfg.algorithm));
    echo.emplace_back("dataset-images", cfg.train_images);
    echo.emplace_back("dataset-labels", cfg.train_labels);
    echo.emplace_back("test-images", cfg.test_images);
    echo.emplace_back("test-labels", cfg.test_labels);
    echo.emplace_back("train-limit", std::to_string(cfg.train_limit));
    echo.emplace_back("model", cfg.model == ArchKind::Mlp ? "mlp" : "logistic");
    echo.emplace_back("hidden-dim", std::to_string(cfg.hidden_dim));
    echo.emplace_back("clients", std::to_string(cfg.total_clients));
    echo.emplace_back("select-frac", format_double(cfg.select_frac));
    echo.emplace_back("rounds", std::to_string(cfg.rounds));
    echo.emplace_back("epochs", std::to_string(cfg.epochs));
    echo.emplace_back("periods", std::to_string(cfg.periods));
    echo.emplace_back("gamma", format_double(cfg.gamma));
    echo.emplace_back("partition", scheme_name(cfg.partition));
    echo.emplace_back("alpha", format_double(cfg.alpha));
    echo.emplace_back("shards-per-client", std::to_string(cfg.shards_per_client));
    echo.emplace_back("lr", format_double(cfg.lr));
    echo.emplace_back("momentum", format_double(cfg.momentum));
    echo.emplace_back("lr-decay", format_double(cfg.lr_decay));
    echo.emplace_back("batch-size", std::to_string(cfg.batch_size));
    echo.emplace_back("prox-mu", format_double(cfg.prox_mu));
    echo.emplace_back("server-lr", format_double(cfg.server_lr));
    echo.emplace_back("exchange-semantics",
                      cfg.exchange_semantics == ExchangeSemantics::Snapshot ? "snapshot"
                                                                            : "sequential");
    echo.emplace_back("ring-order",
                      cfg.ring_order == RingOrder::Ascending ? "ascending" : "shuffled");
    echo.emplace_back("weighted-average", cfg.weighted_average ? "true" : "false");
    echo.emplace_back("final-exchange", cfg.final_exchange ? "true" : "false");
    echo.emplace_back("seed", std::to_string(cfg.seed));
    echo.emplace_back("target-accuracy", format_double(cfg.target_accuracy));
    echo.emplace_back("tail-window", std::to_string(cfg.tail_window));
    return echo;
}

std::vector<SweepPoint> expand_sweep(const SweepSpec& spec) {
    for (const auto& [key, values] : spec.grid) {
        if (values.empty()) throw ConfigError("sweep grid for '" + key + "' lists no values");
        RunConfig probe = spec.base;
        apply_key(probe, key, values.front());  // validates the key name
    }

    std::size_t total = 1;
    for (const auto& [key, values] : spec.grid) total *= values.size();

    std::vector<SweepPoint> points;
    points.reserve(total);
    for (std::size_t index = 0; index < total; ++index) {
        SweepPoint point;
        point.index = index;
        point.config = spec.base;
        std::size_t rest = index;
        for (const auto& [key, values] : spec.grid) {
            const std::string& value = values[rest % values.size()];
            rest /= values.size();
            apply_key(point.config, key, value);
            point.assignment.emplace_back(key, value);
        }
        point.config.seed = rng::mix({spec.base.seed, static_cast<std::uint64_t>(index)});
        point.config.validate();
        points.push_back(std::move(point));
    }
    return points;
}

SweepReport run_sweep(const SweepSpec& spec, const Dataset& train, const Dataset& test,
                      const std::string& out_dir, int parallel) {
    const std::vector<SweepPoint> points = expand_sweep(spec);
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    SweepReport report;
    report.runs.resize(points.size());

    auto run_one = [&](std::size_t i) {
        SweepRunResult& result = report.runs[i];
        result.point = points[i];
        try {
            const RunConfig& cfg = points[i].config;
            const MetricsLog log = run_experiment(cfg, train, test);
            result.summary = summarize(log, cfg.target_accuracy, cfg.tail_window);
            if (!out_dir.empty()) {
                std::ostringstream stem;
                stem << out_dir << "/run_" << std::setw(3) << std::setfill('0') << i;
                emit_csv(log, stem.str() + ".csv");
                emit_json(log, result.summary, config_echo(cfg), stem.str() + ".json");
            }
            result.ok = true;
        } catch (const std::exception& e) {
            result.ok = false;
            result.error = e.what();
        }
    };

    if (parallel <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) run_one(i);
    } else {
        std::vector<std::future<void>> inflight;
        for (std::size_t i = 0; i < points.size(); ++i) {
            inflight.push_back(std::async(std::launch::async, run_one, i));
            if (inflight.size() >= static_cast<std::size_t>(parallel)) {
                inflight.front().get();
                inflight.erase(inflight.begin());
            }
        }
        for (auto& f : inflight) f.get();
    }

    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        const SweepRunResult& result = report.runs[i];
        if (!result.ok) continue;
        const std::string name = algorithm_name(result.point.config.algorithm);
        const auto it = report.best_by_algorithm.find(name);
        if (it == report.best_by_algorithm.end() ||
            result.summary.tail.mean > report.runs[it->second].summary.tail.mean) {
            report.best_by_algorithm[name] = i;
        }
    }
    return report;
}

}  // namespace ringfed

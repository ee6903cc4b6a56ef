#include "ringfed/orchestrator.hpp"

#include "ringfed/errors.hpp"
#include "ringfed/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>
#include <utility>

namespace ringfed {

namespace {

constexpr std::uint64_t kSelectTag = 0x5e1e;
constexpr std::uint64_t kRingTag = 0x4179;
constexpr std::uint64_t kPartitionTag = 0x9a47;

}  // namespace

std::string algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::FedAvg: return "fedavg";
        case Algorithm::RingFed: return "ringfed";
        case Algorithm::FedProx: return "fedprox";
        case Algorithm::Scaffold: return "scaffold";
    }
    return "?";
}

int RunConfig::selected_count() const {
    const int k = static_cast<int>(std::lround(total_clients * select_frac));
    if (k < 1) {
        std::ostringstream msg;
        msg << "round(" << total_clients << " clients x " << select_frac
            << ") selects no clients";
        throw ConfigError(msg.str());
    }
    return k;
}

void RunConfig::validate() const {
    if (total_clients < 1) throw ConfigError("clients must be >= 1");
    if (select_frac <= 0.0 || select_frac > 1.0) throw ConfigError("select-frac must be in (0,1]");
    (void)selected_count();
    if (rounds < 0) throw ConfigError("rounds must be >= 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (periods < 1) throw ConfigError("periods must be >= 1");
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must be in [0,1]");
    if (batch_size < 1) throw ConfigError("batch-size must be >= 1");
    if (lr <= 0.0) throw ConfigError("lr must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) {
        throw ConfigError("momentum must be in [0,1); pass 1.0 on the CLI for plain SGD");
    }
    if (lr_decay <= 0.0 || lr_decay > 1.0) throw ConfigError("lr-decay must be in (0,1]");
    if (alpha <= 0.0) throw ConfigError("alpha must be > 0");
    if (shards_per_client < 1) throw ConfigError("shards-per-client must be >= 1");
    if (prox_mu < 0.0) throw ConfigError("prox-mu must be >= 0");
    if (server_lr <= 0.0) throw ConfigError("server-lr must be > 0");
    if (target_accuracy <= 0.0 || target_accuracy >= 1.0) {
        throw ConfigError("target-accuracy must be in (0,1)");
    }
    if (tail_window < 1) throw ConfigError("tail-window must be >= 1");
    if (train_limit < 0) throw ConfigError("train-limit must be >= 0");
    if (hidden_dim < 1) throw ConfigError("hidden-dim must be >= 1");
}

std::vector<int> select_clients(int total_clients, double select_frac, std::uint64_t round_seed) {
    if (select_frac <= 0.0 || select_frac > 1.0) throw ConfigError("select-frac must be in (0,1]");
    const int k = static_cast<int>(std::lround(total_clients * select_frac));
    if (k < 1) throw ConfigError("selection fraction rounds to zero clients");

    std::vector<int> ids(total_clients);
    std::iota(ids.begin(), ids.end(), 0);
    rng::Prng prng(round_seed);
    // Partial Fisher-Yates: the first k slots become the draw.
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(prng.below(static_cast<std::uint64_t>(total_clients - i)));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(k);
    std::sort(ids.begin(), ids.end());
    return ids;
}

Orchestrator::Orchestrator(const RunConfig& cfg, const Dataset& train, const Dataset& test)
    : cfg_(cfg), train_(train), test_(test) {
    cfg_.validate();
    const int classes = std::max(train.num_classes, test.num_classes);
    model_ = cfg.model == ArchKind::Mlp
                 ? Model::mlp(static_cast<int>(train.dim()), cfg.hidden_dim, classes)
                 : Model::logistic(static_cast<int>(train.dim()), classes);

    PartitionSpec part;
    part.scheme = cfg.partition;
    part.num_clients = cfg.total_clients;
    part.shards_per_client = cfg.shards_per_client;
    part.alpha = cfg.alpha;
    part.seed = rng::mix({cfg.seed, kPartitionTag});
    shards_ = make_partition(train, part);
    scaffold_ = ScaffoldState::init(model_.param_count());
}

TrainOptions Orchestrator::base_train_options(int round) const {
    TrainOptions opt;
    opt.epochs = cfg_.epochs;
    opt.batch_size = cfg_.batch_size;
    opt.lr = cfg_.lr * std::pow(cfg_.lr_decay, round);
    opt.momentum = cfg_.momentum;
    opt.round = round;
    return opt;
}

std::vector<int> Orchestrator::selected_for_round(int round) const {
    return select_clients(cfg_.total_clients, cfg_.select_frac,
                          rng::mix({cfg_.seed, kSelectTag, static_cast<std::uint64_t>(round)}));
}

ParamVector Orchestrator::run_round(const ParamVector& global, int round) {
    return cfg_.algorithm == Algorithm::RingFed ? run_round_ringfed(global, round)
                                                : run_round_fedavg(global, round);
}

ParamVector Orchestrator::run_round_fedavg(const ParamVector& global, int round) {
    const std::vector<int> selected = selected_for_round(round);
    ledger_.downlink += cfg_.total_clients;  // broadcast to every client

    const bool scaffold = cfg_.algorithm == Algorithm::Scaffold;
    std::vector<ClientUpdate> updates;
    std::vector<ParamVector> control_deltas;
    updates.reserve(selected.size());

    for (const int id : selected) {
        TrainOptions opt = base_train_options(round);
        if (cfg_.algorithm == Algorithm::FedProx) opt.prox_mu = cfg_.prox_mu;

        ParamVector control_before;
        if (scaffold) {
            ParamVector& control = scaffold_.control_for(id, model_.param_count());
            control_before = control;
            opt.server_control = &scaffold_.server_control;
            opt.client_control = &control;
        }
        try {
            updates.push_back(local_train(model_, train_, shards_[id], global, opt));
        } catch (const std::exception& e) {
            throw InternalError("client " + std::to_string(id) + ": " + e.what());
        }
        if (scaffold) {
            control_deltas.push_back(scaffold_.client_controls.at(id) - control_before);
        }
    }
    ledger_.uplink += static_cast<long long>(updates.size());

    if (scaffold) {
        return scaffold_server_update(scaffold_, global, updates, control_deltas,
                                      cfg_.total_clients, cfg_.server_lr);
    }
    return fedavg_aggregate(updates, cfg_.weighted_average);
}

ParamVector Orchestrator::run_round_ringfed(const ParamVector& global, int round) {
    const std::vector<int> selected = selected_for_round(round);
    ledger_.downlink += cfg_.total_clients;

    std::vector<int> order = selected;  // ascending ids by default
    if (cfg_.ring_order == RingOrder::Shuffled) {
        rng::Prng prng(rng::mix({cfg_.seed, kRingTag, static_cast<std::uint64_t>(round)}));
        prng.shuffle(order);
    }
    const ExchangeConfig exchange = ExchangeConfig::make(cfg_.gamma, order, selected);

    const TrainOptions opt = base_train_options(round);
    std::vector<ClientTrainState> states(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        states[i].params = global;
        states[i].opt = OptimizerState::make(opt.lr, opt.momentum, 1.0, global.size());
    }

    for (int p = 0; p < cfg_.periods; ++p) {
        for (std::size_t i = 0; i < order.size(); ++i) {
            train_epochs(model_, train_, shards_[exchange.ring_order[i]], states[i], opt,
                         cfg_.epochs, p * cfg_.epochs);
        }
        const bool exchange_now = (p + 1 < cfg_.periods) || cfg_.final_exchange;
        if (exchange_now) {
            if (order.size() >= 2) {
                std::vector<ParamVector> circulating(order.size());
                for (std::size_t i = 0; i < order.size(); ++i) {
                    circulating[i] = std::move(states[i].params);
                }
                circulating = ring_exchange(circulating, exchange.gamma, cfg_.exchange_semantics);
                for (std::size_t i = 0; i < order.size(); ++i) {
                    states[i].params = std::move(circulating[i]);
                }
                ledger_.peer += static_cast<long long>(order.size());
            } else {
                std::clog << "[ringfed] round " << round << ": ring of size " << order.size()
                          << ", exchange skipped\n";
            }
        }
    }

    std::vector<ClientUpdate> updates;
    updates.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int id = exchange.ring_order[i];
        updates.push_back(ClientUpdate{id, std::move(states[i].params), shards_[id].size()});
    }
    ledger_.uplink += static_cast<long long>(updates.size());
    return fedavg_aggregate(updates, cfg_.weighted_average);
}

MetricsRecord Orchestrator::evaluate(const ParamVector& params, int round) const {
    const EvalResult eval = forward_loss(model_, params, test_.features, test_.labels);
    MetricsRecord rec;
    rec.round = round;
    rec.test_accuracy = static_cast<double>(eval.correct) / static_cast<double>(test_.size());
    rec.test_loss = eval.loss;
    rec.uplink_units = ledger_.uplink;
    rec.downlink_units = ledger_.downlink;
    rec.peer_units = ledger_.peer;
    return rec;
}

ParamVector Orchestrator::initial_params() const { return init_params(model_, cfg_.seed); }

MetricsLog Orchestrator::run() {
    ParamVector global = initial_params();
    MetricsLog log;
    log.push_back(evaluate(global, 0));
    for (int t = 0; t < cfg_.rounds; ++t) {
        try {
            global = run_round(global, t);
        } catch (const std::exception& e) {
            throw InternalError("round " + std::to_string(t) + ": " + e.what());
        }
        log.push_back(evaluate(global, t + 1));
    }
    return log;
}

MetricsLog run_experiment(const RunConfig& cfg) {
    if (cfg.train_images.empty() || cfg.train_labels.empty() || cfg.test_images.empty() ||
        cfg.test_labels.empty()) {
        throw ConfigError("dataset paths are required (train/test images and labels)");
    }
    Dataset train = load_idx(cfg.train_images, cfg.train_labels);
    if (cfg.train_limit > 0) train = train.head(cfg.train_limit);
    const Dataset test = load_idx(cfg.test_images, cfg.test_labels);
    return run_experiment(cfg, train, test);
}

MetricsLog run_experiment(const RunConfig& cfg, const Dataset& train, const Dataset& test) {
    Orchestrator orchestrator(cfg, train, test);
    return orchestrator.run();
}

}  // namespace ringfed

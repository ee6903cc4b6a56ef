#pragma once

#include "ringfed/aggregation.hpp"
#include "ringfed/dataset.hpp"
#include "ringfed/metrics.hpp"
#include "ringfed/model.hpp"
#include "ringfed/partition.hpp"
#include "ringfed/training.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ringfed {

enum class Algorithm { FedAvg, RingFed, FedProx, Scaffold };
enum class RingOrder { Ascending, Shuffled };

std::string algorithm_name(Algorithm algorithm);

// Fully resolved experiment configuration. Defaults follow the headline
// setup: 100 clients, 30% selected, E=5, gamma=0.8, and P=6 periods (five
// exchanges per round).
struct RunConfig {
    Algorithm algorithm = Algorithm::FedAvg;

    std::string train_images, train_labels, test_images, test_labels;
    int train_limit = 0;  // keep only the first N training examples; 0 = all

    ArchKind model = ArchKind::Mlp;
    int hidden_dim = 64;

    int total_clients = 100;   // K_total
    double select_frac = 0.3;  // fraction selected per round, in (0,1]
    int rounds = 100;          // T
    int epochs = 5;            // E
    int periods = 6;           // P (RingFed)
    double gamma = 0.8;        // exchange factor

    PartitionScheme partition = PartitionScheme::Iid;
    int shards_per_client = 2;
    double alpha = 0.001;

    double lr = 5e-3;
    double momentum = 0.9;  // input value 1.0 is mapped to 0 by the CLI
    double lr_decay = 0.99;
    int batch_size = 50;

    double prox_mu = 0.01;   // FedProx
    double server_lr = 1.0;  // SCAFFOLD

    ExchangeSemantics exchange_semantics = ExchangeSemantics::Snapshot;
    RingOrder ring_order = RingOrder::Ascending;
    bool weighted_average = false;
    bool final_exchange = false;  // also exchange after the last period

    std::uint64_t seed = 1;
    double target_accuracy = 0.90;
    int tail_window = 50;

    // round(total_clients * select_frac); must be >= 1
    int selected_count() const;
    void validate() const;
};

// Whole-parameter-vector transmission counters, cumulative over a run.
struct CommLedger {
    long long uplink = 0;    // client -> server
    long long downlink = 0;  // server -> client (broadcast to all clients)
    long long peer = 0;      // client -> client ring transfers
};

// Exactly round(total*frac) distinct ids drawn uniformly without
// replacement, returned ascending.
std::vector<int> select_clients(int total_clients, double select_frac, std::uint64_t round_seed);

// Runs one experiment over pre-partitioned data. Holds only const
// references to the datasets; SCAFFOLD controls are the sole state carried
// across rounds.
class Orchestrator {
public:
    Orchestrator(const RunConfig& cfg, const Dataset& train, const Dataset& test);

    // T rounds with a test-set evaluation after each; record 0 is the
    // evaluation of the freshly initialized parameters.
    MetricsLog run();

    ParamVector run_round(const ParamVector& global, int round);
    ParamVector run_round_fedavg(const ParamVector& global, int round);  // also Prox/Scaffold
    ParamVector run_round_ringfed(const ParamVector& global, int round);

    MetricsRecord evaluate(const ParamVector& params, int round) const;
    ParamVector initial_params() const;
    std::vector<int> selected_for_round(int round) const;

    const Model& model() const { return model_; }
    const CommLedger& ledger() const { return ledger_; }
    const std::vector<ClientShard>& shards() const { return shards_; }

private:
    TrainOptions base_train_options(int round) const;

    const RunConfig cfg_;
    const Dataset& train_;
    const Dataset& test_;
    Model model_;
    std::vector<ClientShard> shards_;
    ScaffoldState scaffold_;
    CommLedger ledger_;
};

// Loads the datasets named by the config and runs the experiment.
MetricsLog run_experiment(const RunConfig& cfg);
MetricsLog run_experiment(const RunConfig& cfg, const Dataset& train, const Dataset& test);

}  // namespace ringfed

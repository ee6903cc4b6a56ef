#pragma once

#include "ringfed/dataset.hpp"
#include "ringfed/model.hpp"
#include "ringfed/optimizer.hpp"
#include "ringfed/partition.hpp"

namespace ringfed {

// Uploaded result of one client's local training.
struct ClientUpdate {
    int client_id = 0;
    ParamVector params;
    Index num_examples = 0;  // 0 only for clients whose shard is empty
};

// Local-objective variants layered on plain SGD. prox_mu > 0 adds
// mu*(w - anchor) to each gradient; setting both control pointers engages
// the SCAFFOLD correction (server_control - client_control) and rewrites
// *client_control after training.
struct TrainOptions {
    int epochs = 1;
    int batch_size = 50;
    double lr = 0.01;      // effective rate for this round (decay applied by caller)
    double momentum = 0.0;
    double prox_mu = 0.0;
    const ParamVector* prox_anchor = nullptr;     // defaults to the starting params
    const ParamVector* server_control = nullptr;  // SCAFFOLD
    ParamVector* client_control = nullptr;        // SCAFFOLD, in/out
    int round = 0;
};

// Evolving per-client state; RingFed keeps it alive across the periods of a
// round so parameters and momentum carry through exchanges.
struct ClientTrainState {
    ParamVector params;
    OptimizerState opt;
};

// Runs `epochs` full passes over the shard. Epoch shuffles are keyed by
// (shard seed, round, epoch_base + e). Returns the number of SGD steps taken.
int train_epochs(const Model& model, const Dataset& data, const ClientShard& shard,
                 ClientTrainState& state, const TrainOptions& opt, int epochs, int epoch_base);

// One client's full local pass for a round: fresh momentum, E epochs,
// variant adjustments, SCAFFOLD control update. An empty shard uploads the
// starting parameters unchanged.
ClientUpdate local_train(const Model& model, const Dataset& data, const ClientShard& shard,
                         const ParamVector& start, const TrainOptions& opt);

}  // namespace ringfed

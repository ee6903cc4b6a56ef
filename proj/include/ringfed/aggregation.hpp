#pragma once

#include "ringfed/training.hpp"
#include "ringfed/types.hpp"

#include <map>
#include <vector>

namespace ringfed {

// Unweighted mean of the uploaded parameter vectors, reduced in ascending
// client_id order so results are bitwise reproducible. weighted=true weights
// by example counts instead.
ParamVector fedavg_aggregate(const std::vector<ClientUpdate>& updates, bool weighted = false);

// Snapshot: every right-hand side reads pre-exchange values (one ring hop).
// Sequential: the literal in-place loop, where later clients mix already
// mixed values.
enum class ExchangeSemantics { Snapshot, Sequential };

// Ring mixing with factor gamma: position k receives
//   gamma * old[k-1] + (1-gamma) * old[k],  predecessor of 0 being K-1.
// gamma=0 is the identity; gamma=1 a one-step rotation. Lists shorter than
// two are returned unchanged (degenerate ring, notice logged).
std::vector<ParamVector> ring_exchange(const std::vector<ParamVector>& params, double gamma,
                                       ExchangeSemantics semantics = ExchangeSemantics::Snapshot);

// Mixing weight plus the ring ordering of the selected clients.
struct ExchangeConfig {
    double gamma = 0.8;
    std::vector<int> ring_order;  // each selected client exactly once

    // Throws ConfigError when gamma leaves [0,1] or the order is not a
    // permutation of the selected ids.
    static ExchangeConfig make(double gamma, std::vector<int> ring_order,
                               const std::vector<int>& selected);
};

// SCAFFOLD control variates; all vectors are model-length, zero-initialized.
struct ScaffoldState {
    ParamVector server_control;
    std::map<int, ParamVector> client_controls;

    static ScaffoldState init(Index dim);
    ParamVector& control_for(int client_id, Index dim);
};

// Server half of SCAFFOLD: params move by lr_server times the mean client
// delta; the server control moves by the participation-weighted mean of the
// client-control deltas (K selected out of total_clients).
ParamVector scaffold_server_update(ScaffoldState& state, const ParamVector& global,
                                   const std::vector<ClientUpdate>& updates,
                                   const std::vector<ParamVector>& control_deltas,
                                   int total_clients, double lr_server);

}  // namespace ringfed

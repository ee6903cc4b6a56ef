#include "ringfed/aggregation.hpp"

#include "ringfed/errors.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

namespace ringfed {

ParamVector fedavg_aggregate(const std::vector<ClientUpdate>& updates, bool weighted) {
    if (updates.empty()) throw InternalError("aggregate called with no client updates");

    std::vector<std::size_t> order(updates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return updates[a].client_id < updates[b].client_id;
    });

    const Index dim = updates.front().params.size();
    ParamVector sum = ParamVector::Zero(dim);
    double total_weight = 0.0;
    for (const std::size_t i : order) {
        const ClientUpdate& u = updates[i];
        if (u.params.size() != dim) throw InternalError("aggregate: unequal parameter lengths");
        const double w = weighted ? static_cast<double>(u.num_examples) : 1.0;
        sum += w * u.params;
        total_weight += w;
    }
    if (total_weight <= 0.0) {
        throw InternalError("aggregate: zero total weight (all selected shards empty?)");
    }
    return sum / total_weight;
}

std::vector<ParamVector> ring_exchange(const std::vector<ParamVector>& params, double gamma,
                                       ExchangeSemantics semantics) {
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("exchange factor gamma must be in [0,1]");
    const std::size_t K = params.size();
    if (K < 2) {
        std::clog << "[ringfed] ring of size " << K << ": exchange skipped\n";
        return params;
    }

    if (semantics == ExchangeSemantics::Snapshot) {
        std::vector<ParamVector> next(K);
        for (std::size_t k = 0; k < K; ++k) {
            const std::size_t prev = (k == 0) ? K - 1 : k - 1;
            next[k] = gamma * params[prev] + (1.0 - gamma) * params[k];
        }
        return next;
    }

    // Literal in-place loop: position k+1 reads the already-mixed position k,
    // and the wraparound reads the fully cascaded last position.
    std::vector<ParamVector> next = params;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        next[k + 1] = gamma * next[k] + (1.0 - gamma) * next[k + 1];
    }
    next[0] = gamma * next[K - 1] + (1.0 - gamma) * next[0];
    return next;
}

ExchangeConfig ExchangeConfig::make(double gamma, std::vector<int> ring_order,
                                    const std::vector<int>& selected) {
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("exchange factor gamma must be in [0,1]");
    std::vector<int> a = ring_order;
    std::vector<int> b = selected;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b || std::adjacent_find(a.begin(), a.end()) != a.end()) {
        throw ConfigError("ring order must list each selected client exactly once");
    }
    return ExchangeConfig{gamma, std::move(ring_order)};
}

ScaffoldState ScaffoldState::init(Index dim) {
    ScaffoldState state;
    state.server_control = ParamVector::Zero(dim);
    return state;
}

ParamVector& ScaffoldState::control_for(int client_id, Index dim) {
    auto [it, inserted] = client_controls.try_emplace(client_id);
    if (inserted) it->second = ParamVector::Zero(dim);
    return it->second;
}

ParamVector scaffold_server_update(ScaffoldState& state, const ParamVector& global,
                                   const std::vector<ClientUpdate>& updates,
                                   const std::vector<ParamVector>& control_deltas,
                                   int total_clients, double lr_server) {
    if (updates.empty()) throw InternalError("scaffold update called with no client updates");
    if (updates.size() != control_deltas.size()) {
        throw InternalError("scaffold update: control delta count mismatch");
    }

    std::vector<std::size_t> order(updates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return updates[a].client_id < updates[b].client_id;
    });

    ParamVector delta_sum = ParamVector::Zero(global.size());
    ParamVector control_sum = ParamVector::Zero(global.size());
    for (const std::size_t i : order) {
        delta_sum += updates[i].params - global;
        control_sum += control_deltas[i];
    }
    const auto K = static_cast<double>(updates.size());
    state.server_control += control_sum / static_cast<double>(total_clients);
    return global + (lr_server / K) * delta_sum;
}

}  // namespace ringfed

#include "ringfed/training.hpp"

#include "ringfed/errors.hpp"

namespace ringfed {

int train_epochs(const Model& model, const Dataset& data, const ClientShard& shard,
                 ClientTrainState& state, const TrainOptions& opt, int epochs, int epoch_base) {
    if (epochs < 1) throw ConfigError("local training needs epochs >= 1");
    if (shard.indices.empty()) return 0;

    const ParamVector& anchor = opt.prox_anchor != nullptr ? *opt.prox_anchor : state.params;
    ParamVector prox_pull;  // snapshot: anchor may alias state.params
    if (opt.prox_mu > 0.0) prox_pull = anchor;

    const bool scaffold = opt.server_control != nullptr && opt.client_control != nullptr;
    ParamVector correction;
    if (scaffold) correction = *opt.server_control - *opt.client_control;

    ParamVector grad(state.params.size());
    int steps = 0;
    for (int e = 0; e < epochs; ++e) {
        const auto order = epoch_order(shard, opt.round, epoch_base + e);
        for (const auto& [begin, end] : batch_ranges(shard.size(), opt.batch_size)) {
            const Batch batch = gather(
                data, std::span<const std::int32_t>(order.data() + begin,
                                                    static_cast<std::size_t>(end - begin)));
            grad_and_loss(model, state.params, batch.features, batch.labels, grad);
            if (opt.prox_mu > 0.0) grad += opt.prox_mu * (state.params - prox_pull);
            if (scaffold) grad += correction;
            state.params = sgd_step(state.params, grad, state.opt);
            ++steps;
        }
    }
    return steps;
}

ClientUpdate local_train(const Model& model, const Dataset& data, const ClientShard& shard,
                         const ParamVector& start, const TrainOptions& opt) {
    ClientUpdate update;
    update.client_id = shard.client_id;
    update.num_examples = shard.size();

    if (shard.indices.empty()) {
        update.params = start;  // nothing to train on; echo the broadcast
        return update;
    }

    ClientTrainState state;
    state.params = start;
    state.opt = OptimizerState::make(opt.lr, opt.momentum, 1.0, start.size());

    TrainOptions local = opt;
    local.prox_anchor = opt.prox_anchor != nullptr ? opt.prox_anchor : &start;
    const int steps = train_epochs(model, data, shard, state, local, opt.epochs, 0);

    if (opt.server_control != nullptr && opt.client_control != nullptr && steps > 0 &&
        opt.lr > 0.0) {
        // c_k <- c_k - c + (w_start - w_end) / (steps * lr)
        *opt.client_control += -*opt.server_control +
                               (start - state.params) / (static_cast<double>(steps) * opt.lr);
    }

    update.params = std::move(state.params);
    return update;
}

}  // namespace ringfed

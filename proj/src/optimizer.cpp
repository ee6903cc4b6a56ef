#include "ringfed/optimizer.hpp"

#include "ringfed/errors.hpp"

#include <cmath>

namespace ringfed {

OptimizerState OptimizerState::make(double learning_rate, double momentum, double lr_decay,
                                    Index dim) {
    if (learning_rate < 0.0) throw ConfigError("learning rate must be nonnegative");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0,1)");
    if (lr_decay <= 0.0 || lr_decay > 1.0) throw ConfigError("lr decay must be in (0,1]");
    OptimizerState opt;
    opt.learning_rate = learning_rate;
    opt.momentum = momentum;
    opt.lr_decay = lr_decay;
    opt.velocity = ParamVector::Zero(dim);
    return opt;
}

double OptimizerState::effective_lr(int round) const {
    return learning_rate * std::pow(lr_decay, round);
}

ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, OptimizerState& opt,
                     int round) {
    if (params.size() != grad.size() || params.size() != opt.velocity.size()) {
        throw InternalError("sgd_step: params/grad/velocity length mismatch");
    }
    opt.velocity = opt.momentum * opt.velocity + grad;
    return params - opt.effective_lr(round) * opt.velocity;
}

}  // namespace ringfed

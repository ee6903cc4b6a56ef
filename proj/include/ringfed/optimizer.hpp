#pragma once

#include "ringfed/types.hpp"

namespace ringfed {

// SGD with classical momentum and per-round learning-rate decay.
// velocity has the same length as the parameter vector it updates.
struct OptimizerState {
    double learning_rate = 0.01;  // base rate
    double momentum = 0.0;        // beta in [0,1)
    double lr_decay = 1.0;        // multiplicative, applied once per round
    ParamVector velocity;

    static OptimizerState make(double learning_rate, double momentum, double lr_decay, Index dim);

    // eta * lr_decay^round
    double effective_lr(int round) const;
};

// One SGD step: velocity = beta*velocity + grad, params -= eta_eff*velocity.
// With beta = 0 this is a plain gradient step. Velocity is updated in place.
ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, OptimizerState& opt,
                     int round = 0);

}  // namespace ringfed

#pragma once

#include "ringfed/types.hpp"

#include <cstdint>
#include <string>

namespace ringfed {

enum class ArchKind { LogisticRegression, Mlp };

// Architecture descriptor. Parameters live in one flat column-major vector:
//   LogisticRegression(d, C):  [W (CxD)] [b (C)]
//   Mlp(d, h, C):              [W1 (hxd)] [b1 (h)] [W2 (Cxh)] [b2 (C)]
// so e.g. W(c, j) sits at params[j*C + c]. Tests index this layout directly.
struct Model {
    ArchKind kind = ArchKind::LogisticRegression;
    int input_dim = 0;
    int hidden_dim = 0;  // unused for logistic regression
    int num_classes = 0;

    static Model logistic(int input_dim, int num_classes);
    static Model mlp(int input_dim, int hidden_dim, int num_classes);

    Index param_count() const;
    std::string describe() const;
};

// Deterministic init: weights uniform in +-1/sqrt(fan_in), biases zero.
// Same (model, seed) always yields the identical vector.
ParamVector init_params(const Model& model, std::uint64_t seed);

struct EvalResult {
    double loss = 0.0;   // mean cross-entropy over the batch
    Index correct = 0;   // argmax-prediction matches
};

// Mean cross-entropy and correct count over a batch. Probabilities come from
// a max-shifted softmax; the loss uses log-sum-exp directly so it stays
// finite for any parameter values.
EvalResult forward_loss(const Model& model, const ParamVector& params,
                        const FeatureMatrix& features, const LabelVector& labels);

// Mean gradient of the batch cross-entropy w.r.t. params.
ParamVector backward(const Model& model, const ParamVector& params,
                     const FeatureMatrix& features, const LabelVector& labels);

// Fused training path: one pass computing loss, correct count and gradient.
EvalResult grad_and_loss(const Model& model, const ParamVector& params,
                         const FeatureMatrix& features, const LabelVector& labels,
                         ParamVector& grad_out);

// Row-wise softmax of a logit matrix, shifted by the row max for stability.
// Output rows are probability vectors summing to 1.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

inline EvalResult forward_loss(const Model& model, const ParamVector& params, const Batch& batch) {
    return forward_loss(model, params, batch.features, batch.labels);
}
inline ParamVector backward(const Model& model, const ParamVector& params, const Batch& batch) {
    return backward(model, params, batch.features, batch.labels);
}

}  // namespace ringfed

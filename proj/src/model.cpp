#include "ringfed/model.hpp"

#include "ringfed/errors.hpp"
#include "ringfed/rng.hpp"

#include <cmath>
#include <sstream>

namespace ringfed {

namespace {

void check_batch(const Model& model, const ParamVector& params,
                 const FeatureMatrix& features, const LabelVector& labels) {
    if (features.rows() == 0) {
        throw ConfigError("forward/backward requires a nonempty batch");
    }
    if (features.cols() != model.input_dim) {
        std::ostringstream msg;
        msg << "feature dimension " << features.cols() << " does not match model input_dim "
            << model.input_dim;
        throw ConfigError(msg.str());
    }
    if (features.rows() != labels.size()) {
        throw ConfigError("batch features/labels size mismatch");
    }
    if (params.size() != model.param_count()) {
        throw InternalError("parameter vector length does not match architecture");
    }
}

// Column-major views into the flat parameter vector.
struct LogisticView {
    Eigen::Map<const Eigen::MatrixXd> W;
    Eigen::Map<const Eigen::VectorXd> b;
    LogisticView(const ParamVector& p, int d, int C)
        : W(p.data(), C, d), b(p.data() + static_cast<std::ptrdiff_t>(C) * d, C) {}
};

struct MlpView {
    Eigen::Map<const Eigen::MatrixXd> W1;
    Eigen::Map<const Eigen::VectorXd> b1;
    Eigen::Map<const Eigen::MatrixXd> W2;
    Eigen::Map<const Eigen::VectorXd> b2;
    MlpView(const ParamVector& p, int d, int h, int C)
        : W1(p.data(), h, d),
          b1(p.data() + static_cast<std::ptrdiff_t>(h) * d, h),
          W2(p.data() + static_cast<std::ptrdiff_t>(h) * d + h, C, h),
          b2(p.data() + static_cast<std::ptrdiff_t>(h) * d + h + static_cast<std::ptrdiff_t>(C) * h, C) {}
};

Eigen::MatrixXd logits_of(const Model& model, const ParamVector& params,
                          const FeatureMatrix& X, Eigen::MatrixXd* hidden_out) {
    if (model.kind == ArchKind::LogisticRegression) {
        LogisticView v(params, model.input_dim, model.num_classes);
        Eigen::MatrixXd z = X * v.W.transpose();
        z.rowwise() += v.b.transpose();
        return z;
    }
    MlpView v(params, model.input_dim, model.hidden_dim, model.num_classes);
    Eigen::MatrixXd h = X * v.W1.transpose();
    h.rowwise() += v.b1.transpose();
    h = h.cwiseMax(0.0);  // ReLU
    Eigen::MatrixXd z = h * v.W2.transpose();
    z.rowwise() += v.b2.transpose();
    if (hidden_out != nullptr) *hidden_out = std::move(h);
    return z;
}

// Loss/correct from logits; dlogits (softmax - onehot)/B written when requested.
EvalResult score_logits(const Eigen::MatrixXd& logits, const LabelVector& labels,
                        Eigen::MatrixXd* dlogits_out) {
    const Index B = logits.rows();
    const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
    Eigen::MatrixXd shifted = logits.colwise() - row_max;
    Eigen::MatrixXd expz = shifted.array().exp();
    const Eigen::VectorXd norm = expz.rowwise().sum();

    EvalResult result;
    for (Index i = 0; i < B; ++i) {
        const int y = labels(i);
        result.loss += std::log(norm(i)) - shifted(i, y);
        Index pred;
        logits.row(i).maxCoeff(&pred);
        if (pred == y) ++result.correct;
    }
    result.loss /= static_cast<double>(B);

    if (dlogits_out != nullptr) {
        Eigen::MatrixXd d = expz.array().colwise() / norm.array();
        for (Index i = 0; i < B; ++i) d(i, labels(i)) -= 1.0;
        d /= static_cast<double>(B);
        *dlogits_out = std::move(d);
    }
    return result;
}

}  // namespace

Model Model::logistic(int input_dim, int num_classes) {
    if (input_dim < 1 || num_classes < 2) {
        throw ConfigError("logistic regression needs input_dim >= 1 and num_classes >= 2");
    }
    return Model{ArchKind::LogisticRegression, input_dim, 0, num_classes};
}

Model Model::mlp(int input_dim, int hidden_dim, int num_classes) {
    if (input_dim < 1 || hidden_dim < 1 || num_classes < 2) {
        throw ConfigError("mlp needs input_dim, hidden_dim >= 1 and num_classes >= 2");
    }
    return Model{ArchKind::Mlp, input_dim, hidden_dim, num_classes};
}

Index Model::param_count() const {
    const Index d = input_dim, h = hidden_dim, C = num_classes;
    if (kind == ArchKind::LogisticRegression) return d * C + C;
    return d * h + h + h * C + C;
}

std::string Model::describe() const {
    std::ostringstream out;
    if (kind == ArchKind::LogisticRegression) {
        out << "logistic(" << input_dim << "," << num_classes << ")";
    } else {
        out << "mlp(" << input_dim << "," << hidden_dim << "," << num_classes << ")";
    }
    return out.str();
}

ParamVector init_params(const Model& model, std::uint64_t seed) {
    rng::Prng prng(rng::mix({seed, 0x1a17u}));
    ParamVector p = ParamVector::Zero(model.param_count());

    auto fill_uniform = [&](Index offset, Index count, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (Index i = 0; i < count; ++i) p(offset + i) = prng.uniform(-bound, bound);
    };

    const Index d = model.input_dim, h = model.hidden_dim, C = model.num_classes;
    if (model.kind == ArchKind::LogisticRegression) {
        fill_uniform(0, C * d, model.input_dim);  // biases stay zero
    } else {
        fill_uniform(0, h * d, model.input_dim);
        fill_uniform(h * d + h, C * h, model.hidden_dim);
    }
    return p;
}

EvalResult forward_loss(const Model& model, const ParamVector& params,
                        const FeatureMatrix& features, const LabelVector& labels) {
    check_batch(model, params, features, labels);
    return score_logits(logits_of(model, params, features, nullptr), labels, nullptr);
}

ParamVector backward(const Model& model, const ParamVector& params,
                     const FeatureMatrix& features, const LabelVector& labels) {
    ParamVector grad(params.size());
    grad_and_loss(model, params, features, labels, grad);
    return grad;
}

EvalResult grad_and_loss(const Model& model, const ParamVector& params,
                         const FeatureMatrix& features, const LabelVector& labels,
                         ParamVector& grad_out) {
    check_batch(model, params, features, labels);
    grad_out.resize(params.size());

    const Index d = model.input_dim, h = model.hidden_dim, C = model.num_classes;

    if (model.kind == ArchKind::LogisticRegression) {
        Eigen::MatrixXd dlogits;
        const EvalResult result =
            score_logits(logits_of(model, params, features, nullptr), labels, &dlogits);
        Eigen::Map<Eigen::MatrixXd> gW(grad_out.data(), C, d);
        Eigen::Map<Eigen::VectorXd> gb(grad_out.data() + static_cast<std::ptrdiff_t>(C) * d, C);
        gW.noalias() = dlogits.transpose() * features;
        gb = dlogits.colwise().sum();
        return result;
    }

    Eigen::MatrixXd hidden;
    Eigen::MatrixXd dlogits;
    const EvalResult result =
        score_logits(logits_of(model, params, features, &hidden), labels, &dlogits);

    MlpView v(params, static_cast<int>(d), static_cast<int>(h), static_cast<int>(C));
    Eigen::Map<Eigen::MatrixXd> gW1(grad_out.data(), h, d);
    Eigen::Map<Eigen::VectorXd> gb1(grad_out.data() + h * d, h);
    Eigen::Map<Eigen::MatrixXd> gW2(grad_out.data() + h * d + h, C, h);
    Eigen::Map<Eigen::VectorXd> gb2(grad_out.data() + h * d + h + C * h, C);

    gW2.noalias() = dlogits.transpose() * hidden;
    gb2 = dlogits.colwise().sum();
    Eigen::MatrixXd dhidden = dlogits * v.W2;
    dhidden = (hidden.array() > 0.0).select(dhidden, 0.0);  // ReLU mask
    gW1.noalias() = dhidden.transpose() * features;
    gb1 = dhidden.colwise().sum();
    return result;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd shifted = logits.colwise() - logits.rowwise().maxCoeff();
    Eigen::MatrixXd expz = shifted.array().exp();
    return expz.array().colwise() / expz.rowwise().sum().array();
}

}  // namespace ringfed

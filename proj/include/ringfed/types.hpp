#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ringfed {

using Index = Eigen::Index;

// Flat model parameter vector: the unit that is trained, exchanged on the
// ring, and averaged by the server. Always double precision.
using ParamVector = Eigen::VectorXd;

// One example per row, features scaled to [0,1].
using FeatureMatrix = Eigen::MatrixXd;
using LabelVector = Eigen::VectorXi;

// A gathered minibatch (rows copied out of a Dataset by index).
struct Batch {
    FeatureMatrix features;  // B x d
    LabelVector labels;      // B
};

}  // namespace ringfed

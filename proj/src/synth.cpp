#include "ringfed/synth.hpp"

#include "ringfed/errors.hpp"
#include "ringfed/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ringfed {

namespace {

constexpr int kGrid = 7;  // coarse field resolution before upsampling

// Bilinear upsample of a kGrid x kGrid field to rows x cols.
Eigen::MatrixXd upsample(const Eigen::MatrixXd& coarse, int rows, int cols) {
    Eigen::MatrixXd out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const double y = (kGrid - 1) * static_cast<double>(r) / std::max(rows - 1, 1);
        const int y0 = std::min(static_cast<int>(y), kGrid - 2);
        const double fy = y - y0;
        for (int c = 0; c < cols; ++c) {
            const double x = (kGrid - 1) * static_cast<double>(c) / std::max(cols - 1, 1);
            const int x0 = std::min(static_cast<int>(x), kGrid - 2);
            const double fx = x - x0;
            out(r, c) = (1 - fy) * ((1 - fx) * coarse(y0, x0) + fx * coarse(y0, x0 + 1)) +
                        fy * ((1 - fx) * coarse(y0 + 1, x0) + fx * coarse(y0 + 1, x0 + 1));
        }
    }
    return out;
}

Eigen::MatrixXd random_field(rng::Prng& prng, int rows, int cols) {
    Eigen::MatrixXd coarse(kGrid, kGrid);
    for (int r = 0; r < kGrid; ++r) {
        for (int c = 0; c < kGrid; ++c) coarse(r, c) = prng.normal();
    }
    return upsample(coarse, rows, cols);
}

Dataset make_split(const SynthSpec& spec, const std::vector<Eigen::MatrixXd>& prototypes,
                   int count, std::uint64_t split_tag) {
    const Index dim = static_cast<Index>(spec.rows) * spec.cols;
    Dataset ds;
    ds.features.resize(count, dim);
    ds.labels.resize(count);
    ds.num_classes = spec.classes;

    rng::Prng prng(rng::mix({spec.seed, split_tag}));
    for (int i = 0; i < count; ++i) {
        const int label = i % spec.classes;
        ds.labels(i) = label;
        const Eigen::MatrixXd field = random_field(prng, spec.rows, spec.cols);
        Index j = 0;
        for (int r = 0; r < spec.rows; ++r) {
            for (int c = 0; c < spec.cols; ++c, ++j) {
                double v = 0.5 + spec.contrast * prototypes[label](r, c) +
                           spec.wobble * field(r, c) + spec.noise * prng.normal();
                v = std::clamp(v, 0.0, 1.0);
                // Quantize like an 8-bit image so IDX round trips are exact.
                ds.features(i, j) = static_cast<double>(std::lround(v * 255.0)) / 255.0;
            }
        }
    }
    return ds;
}

}  // namespace

SynthCorpus make_synth(const SynthSpec& spec) {
    if (spec.classes < 2) throw ConfigError("synthetic corpus needs at least two classes");
    if (spec.train_count % spec.classes != 0 || spec.test_count % spec.classes != 0) {
        throw ConfigError("synthetic corpus counts must be divisible by the class count");
    }

    rng::Prng proto_rng(rng::mix({spec.seed, 0x70u}));
    std::vector<Eigen::MatrixXd> prototypes;
    prototypes.reserve(spec.classes);
    for (int c = 0; c < spec.classes; ++c) {
        prototypes.push_back(random_field(proto_rng, spec.rows, spec.cols));
    }

    SynthCorpus corpus;
    corpus.train = make_split(spec, prototypes, spec.train_count, 0x7261u);
    corpus.test = make_split(spec, prototypes, spec.test_count, 0x7465u);
    return corpus;
}

}  // namespace ringfed

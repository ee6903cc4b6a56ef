#pragma once

#include "ringfed/dataset.hpp"

#include <cstdint>

namespace ringfed {

// Deterministic synthetic image-classification corpus. Each class gets a
// smooth random prototype pattern; examples add a per-example smooth
// deformation plus pixel noise and are quantized to bytes, so a
// write_idx/load_idx round trip is exact. Labels interleave (label = i mod
// classes), keeping every head-subset balanced.
struct SynthSpec {
    int train_count = 60000;
    int test_count = 10000;
    int classes = 10;
    int rows = 28;
    int cols = 28;
    double contrast = 0.45;  // prototype strength
    double wobble = 0.35;    // per-example smooth deformation
    double noise = 0.18;     // iid pixel noise sigma
    std::uint64_t seed = 7;
};

struct SynthCorpus {
    Dataset train;
    Dataset test;
};

SynthCorpus make_synth(const SynthSpec& spec);

}  // namespace ringfed

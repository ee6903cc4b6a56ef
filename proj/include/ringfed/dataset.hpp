#pragma once

#include "ringfed/types.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace ringfed {

// Image-classification dataset, features scaled to [0,1], one example per row.
struct Dataset {
    FeatureMatrix features;  // N x d
    LabelVector labels;      // N, values in [0, num_classes)
    int num_classes = 0;

    Index size() const { return features.rows(); }
    Index dim() const { return features.cols(); }

    // Keeps the first n examples (used for desk-scale subsets).
    Dataset head(Index n) const;
};

// Reads an IDX image/label pair. Magic numbers 0x00000803 (images, u8,
// count x rows x cols) and 0x00000801 (labels, u8, count), all dimension
// words big-endian. Pixels are divided by 255 and images flattened
// row-major. Paths ending in .gz are inflated transparently.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writes the inverse of load_idx (pixels rounded back to bytes). Pass a
// .gz suffix to compress.
void write_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path,
               int rows, int cols);

// Copies the selected rows into a contiguous batch.
Batch gather(const Dataset& ds, std::span<const std::int32_t> indices);

}  // namespace ringfed

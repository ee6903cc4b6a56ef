#include "ringfed/dataset.hpp"

#include "ringfed/errors.hpp"

#include <zlib.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace ringfed {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

bool has_gz_suffix(const std::string& path) {
    return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    if (has_gz_suffix(path)) {
        gzFile gz = gzopen(path.c_str(), "rb");
        if (gz == nullptr) throw IngestError("cannot open " + path);
        std::vector<std::uint8_t> bytes;
        std::uint8_t chunk[1 << 16];
        int n;
        while ((n = gzread(gz, chunk, sizeof(chunk))) > 0) {
            bytes.insert(bytes.end(), chunk, chunk + n);
        }
        const bool bad = n < 0;
        gzclose(gz);
        if (bad) throw IngestError("gzip inflate failed for " + path);
        return bytes;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

class IdxReader {
public:
    IdxReader(std::vector<std::uint8_t> bytes, std::string path)
        : bytes_(std::move(bytes)), path_(std::move(path)) {}

    std::uint32_t read_u32() {
        if (pos_ + 4 > bytes_.size()) throw IngestError("truncated IDX header in " + path_);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
        return v;
    }

    const std::uint8_t* payload(std::size_t count) {
        if (pos_ + count > bytes_.size()) {
            std::ostringstream msg;
            msg << "truncated IDX payload in " << path_ << " (need " << count << " bytes, have "
                << bytes_.size() - pos_ << ")";
            throw IngestError(msg.str());
        }
        const std::uint8_t* p = bytes_.data() + pos_;
        pos_ += count;
        return p;
    }

    void expect_magic(std::uint32_t want) {
        const std::uint32_t got = read_u32();
        if (got != want) {
            std::ostringstream msg;
            msg << "bad IDX magic in " << path_ << ": got 0x" << std::hex << got << ", want 0x"
                << want;
            throw IngestError(msg.str());
        }
    }

    const std::string& path() const { return path_; }

private:
    std::vector<std::uint8_t> bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    if (has_gz_suffix(path)) {
        gzFile gz = gzopen(path.c_str(), "wb");
        if (gz == nullptr) throw IngestError("cannot open " + path + " for writing");
        const int written = gzwrite(gz, bytes.data(), static_cast<unsigned>(bytes.size()));
        gzclose(gz);
        if (written != static_cast<int>(bytes.size())) {
            throw IngestError("gzip write failed for " + path);
        }
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IngestError("write failed for " + path);
}

void push_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

Dataset Dataset::head(Index n) const {
    if (n > size()) n = size();
    Dataset out;
    out.features = features.topRows(n);
    out.labels = labels.head(n);
    out.num_classes = num_classes;
    return out;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    IdxReader images(read_file_bytes(images_path), images_path);
    images.expect_magic(kImagesMagic);
    const std::uint32_t n_images = images.read_u32();
    const std::uint32_t rows = images.read_u32();
    const std::uint32_t cols = images.read_u32();
    const std::size_t dim = static_cast<std::size_t>(rows) * cols;
    const std::uint8_t* pixels = images.payload(static_cast<std::size_t>(n_images) * dim);

    IdxReader labels(read_file_bytes(labels_path), labels_path);
    labels.expect_magic(kLabelsMagic);
    const std::uint32_t n_labels = labels.read_u32();
    if (n_labels != n_images) {
        std::ostringstream msg;
        msg << "image/label count mismatch: " << images_path << " has " << n_images << ", "
            << labels_path << " has " << n_labels;
        throw IngestError(msg.str());
    }
    const std::uint8_t* label_bytes = labels.payload(n_labels);

    Dataset ds;
    ds.features.resize(n_images, static_cast<Index>(dim));
    ds.labels.resize(n_images);
    int max_label = 0;
    for (std::uint32_t i = 0; i < n_images; ++i) {
        const std::uint8_t* px = pixels + static_cast<std::size_t>(i) * dim;
        for (std::size_t j = 0; j < dim; ++j) {
            ds.features(i, static_cast<Index>(j)) = static_cast<double>(px[j]) / 255.0;
        }
        ds.labels(i) = label_bytes[i];
        if (ds.labels(i) > max_label) max_label = ds.labels(i);
    }
    ds.num_classes = max_label + 1;
    return ds;
}

void write_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path,
               int rows, int cols) {
    if (static_cast<Index>(rows) * cols != ds.dim()) {
        throw ConfigError("write_idx: rows*cols does not match feature dimension");
    }
    const Index n = ds.size();

    std::vector<std::uint8_t> img_bytes;
    img_bytes.reserve(16 + static_cast<std::size_t>(n) * ds.dim());
    push_u32_be(img_bytes, kImagesMagic);
    push_u32_be(img_bytes, static_cast<std::uint32_t>(n));
    push_u32_be(img_bytes, static_cast<std::uint32_t>(rows));
    push_u32_be(img_bytes, static_cast<std::uint32_t>(cols));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < ds.dim(); ++j) {
            const double v = ds.features(i, j);
            img_bytes.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
        }
    }

    std::vector<std::uint8_t> lbl_bytes;
    lbl_bytes.reserve(8 + static_cast<std::size_t>(n));
    push_u32_be(lbl_bytes, kLabelsMagic);
    push_u32_be(lbl_bytes, static_cast<std::uint32_t>(n));
    for (Index i = 0; i < n; ++i) lbl_bytes.push_back(static_cast<std::uint8_t>(ds.labels(i)));

    write_file_bytes(images_path, img_bytes);
    write_file_bytes(labels_path, lbl_bytes);
}

Batch gather(const Dataset& ds, std::span<const std::int32_t> indices) {
    Batch batch;
    batch.features.resize(static_cast<Index>(indices.size()), ds.dim());
    batch.labels.resize(static_cast<Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        batch.features.row(static_cast<Index>(i)) = ds.features.row(indices[i]);
        batch.labels(static_cast<Index>(i)) = ds.labels(indices[i]);
    }
    return batch;
}

}  // namespace ringfed

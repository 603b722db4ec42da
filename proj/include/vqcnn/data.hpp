#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vqcnn/rng.hpp"

namespace vqcnn {

// Labeled feature matrix. All datasets in one scenario share the dimension.
struct Dataset {
    std::vector<std::vector<double>> features;  // M rows of length D
    std::vector<int> labels;
    std::set<int> class_set;

    std::size_t size() const { return features.size(); }
    std::size_t dimension() const { return features.empty() ? 0 : features[0].size(); }

    void push(std::vector<double> x, int label) {
        features.push_back(std::move(x));
        labels.push_back(label);
        class_set.insert(label);
    }

    void validate() const {
        if (features.size() != labels.size())
            throw std::invalid_argument("dataset: feature/label length mismatch");
        for (const auto& row : features)
            if (row.size() != dimension())
                throw std::invalid_argument("dataset: ragged feature rows");
    }
};

// Per-client draw request: ordered (class, sample_count) pairs.
struct PartitionPlan {
    std::vector<std::vector<std::pair<int, int>>> clients;
    std::uint64_t rng_seed = 0;
};

// ----- IDX container (MNIST-style) -----

struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> pixels;  // count * rows * cols, scaled into [0, 1]

    const double* image(std::size_t i) const { return pixels.data() + i * rows * cols; }
};

namespace detail {

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes,
                               std::size_t offset) {
    return (std::uint32_t{bytes[offset]} << 24) |
           (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

inline void write_be32(std::vector<std::uint8_t>& bytes, std::uint32_t v) {
    bytes.push_back(static_cast<std::uint8_t>(v >> 24));
    bytes.push_back(static_cast<std::uint8_t>(v >> 16));
    bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    bytes.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace detail

inline IdxImages read_idx_images(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16) throw std::runtime_error("idx images: truncated header");
    if (detail::read_be32(bytes, 0) != 0x00000803u)
        throw std::runtime_error("idx images: wrong magic for images");
    IdxImages out;
    out.count = detail::read_be32(bytes, 4);
    out.rows = detail::read_be32(bytes, 8);
    out.cols = detail::read_be32(bytes, 12);
    const std::size_t payload = out.count * out.rows * out.cols;
    if (bytes.size() != 16 + payload)
        throw std::runtime_error("idx images: truncated payload");
    out.pixels.resize(payload);
    for (std::size_t i = 0; i < payload; ++i)
        out.pixels[i] = static_cast<double>(bytes[16 + i]) / 255.0;
    return out;
}

inline std::vector<int> read_idx_labels(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8) throw std::runtime_error("idx labels: truncated header");
    if (detail::read_be32(bytes, 0) != 0x00000801u)
        throw std::runtime_error("idx labels: wrong magic for labels");
    const std::size_t count = detail::read_be32(bytes, 4);
    if (bytes.size() != 8 + count)
        throw std::runtime_error("idx labels: payload size mismatch");
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = bytes[8 + i];
    return labels;
}

// Writers used for round-trip checks and fixture generation.
inline std::vector<std::uint8_t> write_idx_images(const IdxImages& imgs) {
    std::vector<std::uint8_t> bytes;
    detail::write_be32(bytes, 0x00000803u);
    detail::write_be32(bytes, static_cast<std::uint32_t>(imgs.count));
    detail::write_be32(bytes, static_cast<std::uint32_t>(imgs.rows));
    detail::write_be32(bytes, static_cast<std::uint32_t>(imgs.cols));
    for (double p : imgs.pixels)
        bytes.push_back(static_cast<std::uint8_t>(std::lround(p * 255.0)));
    return bytes;
}

inline std::vector<std::uint8_t> write_idx_labels(const std::vector<int>& labels) {
    std::vector<std::uint8_t> bytes;
    detail::write_be32(bytes, 0x00000801u);
    detail::write_be32(bytes, static_cast<std::uint32_t>(labels.size()));
    for (int y : labels) bytes.push_back(static_cast<std::uint8_t>(y));
    return bytes;
}

// ----- Resampling -----

// Bilinear interpolation, align-corners-false: source coordinate of output
// pixel d is (d + 0.5) * scale - 0.5, clamped to the image.
inline std::vector<double> bilinear_downsample(const std::vector<double>& image,
                                               std::size_t rows, std::size_t cols,
                                               std::size_t out_rows,
                                               std::size_t out_cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("bilinear: empty input");
    if (out_rows == 0 || out_cols == 0)
        throw std::invalid_argument("bilinear: empty output");
    if (image.size() != rows * cols)
        throw std::invalid_argument("bilinear: image size mismatch");
    const double row_scale = static_cast<double>(rows) / static_cast<double>(out_rows);
    const double col_scale = static_cast<double>(cols) / static_cast<double>(out_cols);
    std::vector<double> out(out_rows * out_cols);
    for (std::size_t r = 0; r < out_rows; ++r) {
        double src_r = (static_cast<double>(r) + 0.5) * row_scale - 0.5;
        src_r = std::clamp(src_r, 0.0, static_cast<double>(rows - 1));
        const std::size_t r0 = static_cast<std::size_t>(src_r);
        const std::size_t r1 = std::min(r0 + 1, rows - 1);
        const double fr = src_r - static_cast<double>(r0);
        for (std::size_t c = 0; c < out_cols; ++c) {
            double src_c = (static_cast<double>(c) + 0.5) * col_scale - 0.5;
            src_c = std::clamp(src_c, 0.0, static_cast<double>(cols - 1));
            const std::size_t c0 = static_cast<std::size_t>(src_c);
            const std::size_t c1 = std::min(c0 + 1, cols - 1);
            const double fc = src_c - static_cast<double>(c0);
            const double top = image[r0 * cols + c0] * (1.0 - fc) +
                               image[r0 * cols + c1] * fc;
            const double bot = image[r1 * cols + c0] * (1.0 - fc) +
                               image[r1 * cols + c1] * fc;
            out[r * out_cols + c] = top * (1.0 - fr) + bot * fr;
        }
    }
    return out;
}

// ----- Partitioning -----

// Draw per-client subsets without replacement via one seeded shuffle per
// class. Clients listed earlier in the plan take earlier shuffle positions,
// so distinct plans over the same classes are pairwise disjoint.
inline std::vector<Dataset> partition(const Dataset& dataset,
                                      const PartitionPlan& plan) {
    dataset.validate();
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        by_class[dataset.labels[i]].push_back(i);
    for (auto& [cls, idx] : by_class) {
        Rng rng(derive_seed(plan.rng_seed, 0x9d1ce5u, static_cast<std::uint64_t>(
                                               static_cast<std::int64_t>(cls))));
        rng.shuffle(idx);
    }

    std::map<int, std::size_t> cursor;
    std::vector<Dataset> out;
    for (const auto& requests : plan.clients) {
        Dataset d;
        for (const auto& [cls, count] : requests) {
            auto it = by_class.find(cls);
            if (it == by_class.end())
                throw std::invalid_argument("partition: class " + std::to_string(cls) +
                                            " not in dataset");
            std::size_t& pos = cursor[cls];
            if (pos + static_cast<std::size_t>(count) > it->second.size())
                throw std::invalid_argument("partition: not enough samples of class " +
                                            std::to_string(cls));
            for (int k = 0; k < count; ++k) {
                const std::size_t i = it->second[pos++];
                d.push(dataset.features[i], dataset.labels[i]);
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

// ----- Synthetic data -----

// Gaussian clusters at mutually separated, axis-anchored centers. Features
// are shifted by a positive offset and clamped at zero so they stay valid
// for amplitude encoding.
inline Dataset synthetic_blobs(int classes, int per_class, int dimension,
                               double separation, std::uint64_t seed) {
    if (classes < 2) throw std::invalid_argument("synthetic_blobs: classes must be >= 2");
    if (per_class < 1 || dimension < 1)
        throw std::invalid_argument("synthetic_blobs: bad shape");
    Dataset d;
    const double offset = 4.0;
    for (int c = 0; c < classes; ++c) {
        Rng rng(derive_seed(seed, 0xb10b5u, static_cast<std::uint64_t>(c)));
        std::vector<double> center(static_cast<std::size_t>(dimension), 0.0);
        center[static_cast<std::size_t>(c % dimension)] += separation;
        if (c >= dimension)
            center[static_cast<std::size_t>((c + 1) % dimension)] +=
                0.5 * separation * (1.0 + static_cast<double>(c / dimension));
        for (int k = 0; k < per_class; ++k) {
            std::vector<double> x(static_cast<std::size_t>(dimension));
            for (std::size_t j = 0; j < x.size(); ++j)
                x[j] = std::max(0.0, center[j] + rng.normal() + offset);
            d.push(std::move(x), c);
        }
    }
    return d;
}

}  // namespace vqcnn

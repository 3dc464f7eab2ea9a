#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ssanet/pipeline/dataset.hpp"

namespace ssanet {

struct SplitSpec {
    double train = 0.6;
    double validation = 0.2;
    double test = 0.2;
    std::uint64_t seed = 0;

    void validate() const {
        if (train < 0 || validation < 0 || test < 0) throw ConfigError("split fractions must be >= 0");
        if (std::abs(train + validation + test - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
    }
};

/// Sample indices of each partition; disjoint and together covering 0..n-1.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// Seeded Fisher-Yates shuffle of 0..n-1, cut into round(train*n),
/// round(validation*n) and the remainder. Depends only on n and the split settings.
inline Split split_indices(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Prng rng(child_seed(spec.seed, 0x5b117));
    for (std::size_t i = n; i-- > 1;) std::swap(idx[i], idx[rng.below(i + 1)]);
    const auto n_train = std::min(n, static_cast<std::size_t>(std::lround(spec.train * static_cast<double>(n))));
    const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::lround(spec.validation * static_cast<double>(n))));
    Split s;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.validation.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                        idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
    return s;
}

inline Dataset subset(const Dataset& data, std::span<const std::size_t> idx) {
    Dataset out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(data.at(i));
    return out;
}

/// Per-pixel z-score statistics, pooled over every frame of the fitting samples.
struct NormStats {
    static constexpr double variance_floor = 1e-8;

    Shape frame_shape{1};
    std::vector<double> mean;
    std::vector<double> stddev;  // sqrt(max(var, variance_floor))

    static NormStats fit(const Dataset& data, std::span<const std::size_t> idx) {
        if (idx.empty()) throw DomainError("normalize: empty fitting split");
        NormStats st;
        st.frame_shape = data.at(idx.front()).frames.front().shape();
        const std::size_t px = shape_size(st.frame_shape);
        st.mean.assign(px, 0.0);
        std::vector<double> m2(px, 0.0);
        std::size_t count = 0;
        // Welford, one update per frame
        for (auto i : idx)
            for (const auto& f : data.at(i).frames) {
                if (f.shape() != st.frame_shape) throw DimensionError("normalize: frame shapes differ");
                ++count;
                for (std::size_t p = 0; p < px; ++p) {
                    const double d = f[p] - st.mean[p];
                    st.mean[p] += d / static_cast<double>(count);
                    m2[p] += d * (f[p] - st.mean[p]);
                }
            }
        st.stddev.resize(px);
        for (std::size_t p = 0; p < px; ++p)
            st.stddev[p] = std::sqrt(std::max(m2[p] / static_cast<double>(count), variance_floor));
        return st;
    }

    Tensor apply(const Tensor& f) const {
        if (f.shape() != frame_shape)
            throw DimensionError("normalize: frame " + shape_str(f.shape()) + " vs fitted " + shape_str(frame_shape));
        Tensor y(f.shape());
        for (std::size_t p = 0; p < f.size(); ++p) y[p] = (f[p] - mean[p]) / stddev[p];
        return y;
    }

    Dataset apply(const Dataset& data) const {
        Dataset out = data;
        for (auto& s : out)
            for (auto& f : s.frames) f = apply(f);
        return out;
    }
};

/// Fits on the train indices and applies to the whole dataset.
inline std::pair<Dataset, NormStats> normalize(const Dataset& data, std::span<const std::size_t> train_idx) {
    NormStats st = NormStats::fit(data, train_idx);
    Dataset out = st.apply(data);
    return {std::move(out), std::move(st)};
}

/// Zeroes every pixel whose mask entry is 0 (mask is per pixel, shared by all channels).
inline Dataset apply_mask(const Dataset& data, std::span<const std::uint8_t> mask) {
    Dataset out = data;
    for (auto& s : out)
        for (auto& f : s.frames) {
            const std::size_t c = f.dim(2);
            if (f.size() != mask.size() * c) throw DimensionError("apply_mask: mask does not match frame size");
            for (std::size_t p = 0; p < mask.size(); ++p)
                if (!mask[p])
                    for (std::size_t k = 0; k < c; ++k) f[p * c + k] = 0.0;
        }
    return out;
}

}  // namespace ssanet

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ssanet/neural/gru.hpp"
#include "ssanet/neural/layers.hpp"
#include "ssanet/prng.hpp"

namespace ssanet {

/// Architecture of the per-frame residual extractor + BiGRU + dense head.
///
/// Frame [H,W,C] -> stem conv (valid) -> ReLU -> max pool -> residual
/// blocks -> GAP gives one feature vector per frame; the BiGRU runs over the
/// frame features and its final-step output feeds a 1-unit dense head with a
/// sigmoid.
struct NetworkConfig {
    std::size_t frame_h = 8;
    std::size_t frame_w = 8;
    std::size_t channels = 1;
    std::size_t stem_kernel = 3;
    std::size_t stem_channels = 2;
    std::size_t pool_window = 2;
    std::size_t pool_stride = 2;
    std::size_t block_kernel = 3;
    std::size_t branch_depth = 1;
    std::vector<std::size_t> block_channels{2};  // output channels per residual block
    std::size_t gru_hidden = 4;

    std::size_t feature_dim() const { return block_channels.back(); }

    void validate() const {
        if (!frame_h || !frame_w || !channels || !stem_kernel || !stem_channels || !pool_window || !pool_stride ||
            !block_kernel || !branch_depth || !gru_hidden)
            throw ConfigError("network sizes must all be positive");
        if (block_channels.empty()) throw ConfigError("network needs at least one residual block");
        for (auto c : block_channels)
            if (!c) throw ConfigError("residual block channel counts must be positive");
        if (frame_h < stem_kernel || frame_w < stem_kernel)
            throw ConfigError("frame smaller than stem kernel");
        const std::size_t sh = frame_h - stem_kernel + 1, sw = frame_w - stem_kernel + 1;
        if (sh < pool_window || sw < pool_window) throw ConfigError("pool window larger than stem output");
    }

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct Network {
    NetworkConfig config;
    ConvLayer stem;
    std::vector<ResidualBlock> blocks;
    BiGruLayer gru;
    DenseLayer head;
};

/// Correctly shaped network with every parameter zero.
inline Network zero_network(const NetworkConfig& cfg) {
    cfg.validate();
    Network net;
    net.config = cfg;
    net.stem = ConvLayer::zeros(cfg.stem_kernel, cfg.stem_kernel, cfg.channels, cfg.stem_channels);
    std::size_t in = cfg.stem_channels;
    for (auto out : cfg.block_channels) {
        ResidualBlock blk;
        std::size_t c = in;
        for (std::size_t d = 0; d < cfg.branch_depth; ++d) {
            blk.branch.push_back(ConvLayer::zeros(cfg.block_kernel, cfg.block_kernel, c, out, Padding::same));
            c = out;
        }
        if (in != out) blk.projection = ConvLayer::zeros(1, 1, in, out);
        net.blocks.push_back(std::move(blk));
        in = out;
    }
    net.gru = BiGruLayer::zeros(cfg.gru_hidden, cfg.feature_dim());
    net.head = DenseLayer{Tensor({2 * cfg.gru_hidden, 1}), Tensor({1})};
    return net;
}

/// Spatial extractor for one frame: stem -> ReLU -> pool -> blocks -> GAP.
inline Tensor frame_features(const Tensor& frame, const Network& net) {
    const auto& c = net.config;
    if (frame.shape() != Shape{c.frame_h, c.frame_w, c.channels})
        throw DimensionError("frame " + shape_str(frame.shape()) + " does not match network frame shape " +
                             shape_str({c.frame_h, c.frame_w, c.channels}));
    Tensor x = relu(conv_forward(frame, net.stem));
    x = maxpool_forward(x, c.pool_window, c.pool_stride);
    for (const auto& blk : net.blocks) x = residual_forward(x, blk);
    return gap_forward(x);
}

/// Pre-sigmoid head output for precomputed frame features.
inline double logit_features(std::span<const Tensor> features, const Network& net) {
    const Tensor last = bigru_last(features, net.gru);
    return dense_forward(last, net.head.w, net.head.b)[0];
}

/// BiGRU over precomputed frame features, final-step readout, dense head, sigmoid.
inline double score_features(std::span<const Tensor> features, const Network& net) {
    return sigmoid(logit_features(features, net));
}

inline std::vector<Tensor> sequence_features(std::span<const Tensor> frames, const Network& net) {
    std::vector<Tensor> feats;
    feats.reserve(frames.size());
    for (const auto& f : frames) feats.push_back(frame_features(f, net));
    return feats;
}

/// Anomaly score in (0,1) for a frame sequence.
inline double network_forward(std::span<const Tensor> frames, const Network& net) {
    if (frames.empty()) throw DomainError("network_forward: empty frame sequence");
    const auto feats = sequence_features(frames, net);
    return score_features(feats, net);
}

namespace detail {

inline void fill_normal(Tensor& t, Prng& rng, double stddev) {
    for (auto& v : t.data()) v = stddev * rng.normal();
}

}  // namespace detail

/// Seed-fixed random weights for the convolutional extractor (stem and
/// residual blocks): He-normal kernels, zero biases. Recurrent and head
/// parameters are left untouched.
inline void init_extractor(Network& net, std::uint64_t seed) {
    Prng rng(seed);
    auto he = [&](ConvLayer& l) {
        const double fan_in = static_cast<double>(l.kh() * l.kw() * l.in_channels());
        detail::fill_normal(l.kernel, rng, std::sqrt(2.0 / fan_in));
        for (auto& b : l.bias.data()) b = 0.0;
    };
    he(net.stem);
    for (auto& blk : net.blocks) {
        for (auto& l : blk.branch) he(l);
        if (blk.projection) he(*blk.projection);
    }
}

}  // namespace ssanet

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ssanet/tensor.hpp"

namespace ssanet {

enum class Padding { valid, same };

/// 2-D convolution over an [H, W, C] feature map.
///
/// kernel is [kh, kw, in_ch, out_ch], bias is [out_ch]. The sum is a
/// cross-correlation: Y(i,j,k) = sum_{m,n,l} X(i*s+m, j*s+n, l) * K(m,n,l,k) + b(k).
/// `same` zero-pads so that the output keeps the input's spatial size
/// (stride 1 only); the extra pixel of an even kernel goes to the bottom/right.
struct ConvLayer {
    Tensor kernel{Shape{1, 1, 1, 1}};
    Tensor bias{Shape{1}};
    std::size_t stride = 1;
    Padding padding = Padding::valid;

    std::size_t kh() const { return kernel.dim(0); }
    std::size_t kw() const { return kernel.dim(1); }
    std::size_t in_channels() const { return kernel.dim(2); }
    std::size_t out_channels() const { return kernel.dim(3); }

    void validate() const {
        if (kernel.rank() != 4) throw DimensionError("conv kernel must be rank 4, got " + shape_str(kernel.shape()));
        if (bias.rank() != 1 || bias.dim(0) != out_channels())
            throw DimensionError("conv bias " + shape_str(bias.shape()) + " does not match kernel " +
                                 shape_str(kernel.shape()));
        if (stride == 0) throw DimensionError("conv stride must be >= 1");
        if (padding == Padding::same && stride != 1) throw DimensionError("same padding requires stride 1");
    }

    static ConvLayer zeros(std::size_t kh, std::size_t kw, std::size_t in, std::size_t out,
                           Padding pad = Padding::valid) {
        return ConvLayer{Tensor({kh, kw, in, out}), Tensor({out}), 1, pad};
    }
};

inline Tensor conv_forward(const Tensor& x, const ConvLayer& layer) {
    layer.validate();
    detail::require_rank(x, 3, "conv input");
    const std::size_t h = x.dim(0), w = x.dim(1), c = x.dim(2);
    if (c != layer.in_channels())
        throw DimensionError("conv: input " + shape_str(x.shape()) + " has " + std::to_string(c) +
                             " channels, kernel " + shape_str(layer.kernel.shape()) + " expects " +
                             std::to_string(layer.in_channels()));
    const std::size_t kh = layer.kh(), kw = layer.kw(), oc = layer.out_channels();

    std::size_t pad_top = 0, pad_left = 0, oh = 0, ow = 0;
    if (layer.padding == Padding::same) {
        pad_top = (kh - 1) / 2;
        pad_left = (kw - 1) / 2;
        oh = h;
        ow = w;
    } else {
        if (h < kh || w < kw)
            throw DimensionError("conv: input " + shape_str(x.shape()) + " smaller than kernel " +
                                 shape_str(layer.kernel.shape()));
        oh = (h - kh) / layer.stride + 1;
        ow = (w - kw) / layer.stride + 1;
    }

    Tensor y({oh, ow, oc});
    for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j)
            for (std::size_t k = 0; k < oc; ++k) {
                double s = layer.bias[k];
                for (std::size_t m = 0; m < kh; ++m) {
                    // signed source row; out-of-range rows are zero padding
                    const auto r = static_cast<std::ptrdiff_t>(i * layer.stride + m) -
                                   static_cast<std::ptrdiff_t>(pad_top);
                    if (r < 0 || r >= static_cast<std::ptrdiff_t>(h)) continue;
                    for (std::size_t n = 0; n < kw; ++n) {
                        const auto q = static_cast<std::ptrdiff_t>(j * layer.stride + n) -
                                       static_cast<std::ptrdiff_t>(pad_left);
                        if (q < 0 || q >= static_cast<std::ptrdiff_t>(w)) continue;
                        for (std::size_t l = 0; l < c; ++l)
                            s += x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(q), l) *
                                 layer.kernel.at(m, n, l, k);
                    }
                }
                y.at(i, j, k) = s;
            }
    return y;
}

/// Per-channel maximum over window x window regions placed every `stride` pixels.
inline Tensor maxpool_forward(const Tensor& x, std::size_t window, std::size_t stride) {
    detail::require_rank(x, 3, "maxpool input");
    if (window == 0 || stride == 0) throw DimensionError("maxpool window and stride must be >= 1");
    const std::size_t h = x.dim(0), w = x.dim(1), c = x.dim(2);
    if (window > h || window > w)
        throw DimensionError("maxpool: window " + std::to_string(window) + " larger than input " +
                             shape_str(x.shape()));
    const std::size_t oh = (h - window) / stride + 1, ow = (w - window) / stride + 1;
    Tensor y({oh, ow, c});
    for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j)
            for (std::size_t k = 0; k < c; ++k) {
                double m = -std::numeric_limits<double>::infinity();
                for (std::size_t a = 0; a < window; ++a)
                    for (std::size_t b = 0; b < window; ++b) m = std::max(m, x.at(i * stride + a, j * stride + b, k));
                y.at(i, j, k) = m;
            }
    return y;
}

/// Y = F(X) + P(X): F is the branch (ReLU between convs, none after the
/// last), P is the optional 1x1 projection or the identity. Nothing is
/// applied after the addition.
struct ResidualBlock {
    std::vector<ConvLayer> branch;
    std::optional<ConvLayer> projection;

    std::size_t in_channels() const { return branch.front().in_channels(); }
    std::size_t out_channels() const { return branch.back().out_channels(); }

    void validate() const {
        if (branch.empty()) throw DimensionError("residual block needs at least one branch conv");
        for (std::size_t i = 0; i < branch.size(); ++i) {
            branch[i].validate();
            if (branch[i].padding != Padding::same || branch[i].stride != 1)
                throw DimensionError("residual branch convs must use same padding and stride 1");
            if (i > 0 && branch[i].in_channels() != branch[i - 1].out_channels())
                throw DimensionError("residual branch conv " + std::to_string(i) + " channel chain broken");
        }
        if (projection) {
            projection->validate();
            if (projection->kh() != 1 || projection->kw() != 1 || projection->stride != 1)
                throw DimensionError("residual projection must be a 1x1 stride-1 conv");
            if (projection->in_channels() != in_channels() || projection->out_channels() != out_channels())
                throw DimensionError("residual projection channels do not map input to branch output");
        } else if (in_channels() != out_channels()) {
            throw DimensionError("residual block changes channels " + std::to_string(in_channels()) + " -> " +
                                 std::to_string(out_channels()) + " without a projection");
        }
    }
};

inline Tensor residual_forward(const Tensor& x, const ResidualBlock& block) {
    block.validate();
    detail::require_rank(x, 3, "residual input");
    if (x.dim(2) != block.in_channels())
        throw DimensionError("residual: input " + shape_str(x.shape()) + " vs block input channels " +
                             std::to_string(block.in_channels()));
    Tensor f = x;
    for (std::size_t i = 0; i < block.branch.size(); ++i) {
        f = conv_forward(f, block.branch[i]);
        if (i + 1 < block.branch.size()) f = relu(f);
    }
    const Tensor skip = block.projection ? conv_forward(x, *block.projection) : x;
    return add(f, skip);
}

/// Spatial mean per channel: [H, W, C] -> [C].
inline Tensor gap_forward(const Tensor& x) {
    detail::require_rank(x, 3, "gap input");
    const std::size_t h = x.dim(0), w = x.dim(1), c = x.dim(2);
    Tensor y({c});
    for (std::size_t k = 0; k < c; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) s += x.at(i, j, k);
        y[k] = s / static_cast<double>(h * w);
    }
    return y;
}

/// Fully connected layer, weights stored [in, out] so that Y = W^T X + b.
struct DenseLayer {
    Tensor w{Shape{1, 1}};
    Tensor b{Shape{1}};
};

inline Tensor dense_forward(std::span<const double> x, const Tensor& w, const Tensor& b) {
    detail::require_rank(w, 2, "dense weights");
    detail::require_rank(b, 1, "dense bias");
    if (w.dim(0) != x.size() || w.dim(1) != b.dim(0))
        throw DimensionError("dense: input length " + std::to_string(x.size()) + ", weights " +
                             shape_str(w.shape()) + ", bias " + shape_str(b.shape()));
    Tensor y = b;
    for (std::size_t i = 0; i < w.dim(0); ++i)
        for (std::size_t o = 0; o < w.dim(1); ++o) y[o] += w.at(i, o) * x[i];
    return y;
}

inline Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
    detail::require_rank(x, 1, "dense input");
    return dense_forward(x.data(), w, b);
}

}  // namespace ssanet

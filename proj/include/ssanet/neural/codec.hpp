#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <type_traits>
#include <vector>

#include "ssanet/neural/network.hpp"

namespace ssanet {

/// Visits every parameter tensor in the stable layout order:
///
///   stem.kernel, stem.bias,
///   block{b}.conv{i}.kernel, block{b}.conv{i}.bias, [block{b}.proj.kernel, block{b}.proj.bias],
///   gru.fwd.{w_z,w_r,w,b_z,b_r,b}, gru.bwd.{w_z,w_r,w,b_z,b_r,b},
///   head.w, head.b
///
/// The extractor (stem and blocks) is always a prefix of the layout.
template <class Net, class F>
    requires std::is_same_v<std::remove_const_t<Net>, Network>
void for_each_param(Net& net, F&& f) {
    f(std::string("stem.kernel"), net.stem.kernel);
    f(std::string("stem.bias"), net.stem.bias);
    for (std::size_t b = 0; b < net.blocks.size(); ++b) {
        auto& blk = net.blocks[b];
        const std::string p = "block" + std::to_string(b);
        for (std::size_t i = 0; i < blk.branch.size(); ++i) {
            f(p + ".conv" + std::to_string(i) + ".kernel", blk.branch[i].kernel);
            f(p + ".conv" + std::to_string(i) + ".bias", blk.branch[i].bias);
        }
        if (blk.projection) {
            f(p + ".proj.kernel", blk.projection->kernel);
            f(p + ".proj.bias", blk.projection->bias);
        }
    }
    auto gru = [&](const std::string& p, auto& g) {
        f(p + ".w_z", g.w_z);
        f(p + ".w_r", g.w_r);
        f(p + ".w", g.w);
        f(p + ".b_z", g.b_z);
        f(p + ".b_r", g.b_r);
        f(p + ".b", g.b);
    };
    gru("gru.fwd", net.gru.forward);
    gru("gru.bwd", net.gru.backward);
    f(std::string("head.w"), net.head.w);
    f(std::string("head.b"), net.head.b);
}

/// Bijection between a Network and one flat parameter vector.
class ParamCodec {
  public:
    struct Entry {
        std::string name;
        Shape shape;
        std::size_t offset;
        std::size_t count;
    };

    explicit ParamCodec(NetworkConfig cfg) : config_(std::move(cfg)) {
        const Network zero = zero_network(config_);
        std::size_t off = 0;
        for_each_param(zero, [&](const std::string& name, const Tensor& t) {
            entries_.push_back({name, t.shape(), off, t.size()});
            off += t.size();
            if (name.starts_with("stem.") || name.starts_with("block")) extractor_count_ = off;
        });
        total_ = off;
    }

    const NetworkConfig& config() const noexcept { return config_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t total_count() const noexcept { return total_; }
    /// Parameters of the stem and residual blocks; they occupy [0, extractor_count()).
    std::size_t extractor_count() const noexcept { return extractor_count_; }
    std::size_t trainable_count(bool freeze_extractor) const noexcept {
        return freeze_extractor ? total_ - extractor_count_ : total_;
    }

    Tensor flatten(const Network& net) const {
        if (!(net.config == config_)) throw DimensionError("flatten: network config differs from codec config");
        std::vector<double> v;
        v.reserve(total_);
        for_each_param(net, [&](const std::string&, const Tensor& t) { v.insert(v.end(), t.data().begin(), t.data().end()); });
        if (v.size() != total_) throw DimensionError("flatten: network has " + std::to_string(v.size()) +
                                                    " parameters, codec expects " + std::to_string(total_));
        return Tensor::vector(std::move(v));
    }

    Network unflatten(std::span<const double> v) const {
        if (v.size() != total_)
            throw DimensionError("unflatten: vector length " + std::to_string(v.size()) + " != codec total " +
                                 std::to_string(total_));
        Network net = zero_network(config_);
        std::size_t off = 0;
        for_each_param(net, [&](const std::string&, Tensor& t) {
            std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(off), t.size(), t.data().begin());
            off += t.size();
        });
        return net;
    }

    Network unflatten(const Tensor& v) const { return unflatten(v.data()); }

    /// FNV-1a 64 over the textual layout ("name:shape;" per entry), in hex.
    std::string layout_hash() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        auto eat = [&](const std::string& s) {
            for (unsigned char ch : s) {
                h ^= ch;
                h *= 0x100000001b3ull;
            }
        };
        for (const auto& e : entries_) eat(e.name + ":" + shape_str(e.shape) + ";");
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

  private:
    NetworkConfig config_;
    std::vector<Entry> entries_;
    std::size_t total_ = 0;
    std::size_t extractor_count_ = 0;
};

}  // namespace ssanet

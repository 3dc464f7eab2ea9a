#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ssanet/tensor.hpp"

namespace ssanet {

/// Gate weights act on the concatenation [h_{t-1}, x_t] (previous hidden
/// state first), so each matrix is [hidden, hidden + input].
struct GruParams {
    Tensor w_z{Shape{1, 2}};
    Tensor w_r{Shape{1, 2}};
    Tensor w{Shape{1, 2}};
    Tensor b_z{Shape{1}};
    Tensor b_r{Shape{1}};
    Tensor b{Shape{1}};

    std::size_t hidden() const { return w_z.dim(0); }
    std::size_t input() const { return w_z.dim(1) - w_z.dim(0); }

    static GruParams zeros(std::size_t hidden, std::size_t input) {
        const Shape ws{hidden, hidden + input}, bs{hidden};
        return GruParams{Tensor(ws), Tensor(ws), Tensor(ws), Tensor(bs), Tensor(bs), Tensor(bs)};
    }

    void validate() const {
        detail::require_rank(w_z, 2, "gru W_z");
        if (w_z.dim(1) <= w_z.dim(0)) throw DimensionError("gru weights need hidden + input > hidden columns");
        detail::require_same_shape(w_z, w_r, "gru W_z/W_r");
        detail::require_same_shape(w_z, w, "gru W_z/W");
        detail::require_same_shape(b_z, b_r, "gru b_z/b_r");
        detail::require_same_shape(b_z, b, "gru b_z/b");
        if (b_z.rank() != 1 || b_z.dim(0) != hidden())
            throw DimensionError("gru bias " + shape_str(b_z.shape()) + " does not match hidden " +
                                 std::to_string(hidden()));
    }
};

/// Everything one GRU step computes, for callers that inspect the gates.
struct GruStep {
    Tensor update;     // z_t
    Tensor reset;      // r_t
    Tensor candidate;  // h~_t
    Tensor hidden;     // h_t
};

namespace detail {

// W . [a, x] + bias without materialising the concatenation.
inline double gate_row(const Tensor& w, const Tensor& bias, std::size_t row, std::span<const double> a,
                       std::span<const double> x) {
    const std::size_t cols = w.dim(1);
    const double* wr = w.data().data() + row * cols;
    double s = bias[row];
    for (std::size_t j = 0; j < a.size(); ++j) s += wr[j] * a[j];
    for (std::size_t j = 0; j < x.size(); ++j) s += wr[a.size() + j] * x[j];
    return s;
}

}  // namespace detail

inline GruStep gru_step_detailed(std::span<const double> x_t, std::span<const double> h_prev, const GruParams& p) {
    const std::size_t hs = p.hidden();
    if (h_prev.size() != hs || x_t.size() != p.input())
        throw DimensionError("gru_step: x length " + std::to_string(x_t.size()) + ", h length " +
                             std::to_string(h_prev.size()) + " vs params hidden " + std::to_string(hs) +
                             ", input " + std::to_string(p.input()));
    GruStep s{Tensor({hs}), Tensor({hs}), Tensor({hs}), Tensor({hs})};
    for (std::size_t i = 0; i < hs; ++i) {
        s.update[i] = sigmoid(detail::gate_row(p.w_z, p.b_z, i, h_prev, x_t));
        s.reset[i] = sigmoid(detail::gate_row(p.w_r, p.b_r, i, h_prev, x_t));
    }
    std::vector<double> gated(hs);
    for (std::size_t i = 0; i < hs; ++i) gated[i] = s.reset[i] * h_prev[i];
    for (std::size_t i = 0; i < hs; ++i) {
        s.candidate[i] = std::tanh(detail::gate_row(p.w, p.b, i, gated, x_t));
        s.hidden[i] = (1.0 - s.update[i]) * h_prev[i] + s.update[i] * s.candidate[i];
    }
    return s;
}

inline Tensor gru_step(const Tensor& x_t, const Tensor& h_prev, const GruParams& p) {
    detail::require_rank(x_t, 1, "gru x_t");
    detail::require_rank(h_prev, 1, "gru h_prev");
    return gru_step_detailed(x_t.data(), h_prev.data(), p).hidden;
}

struct BiGruLayer {
    GruParams forward;
    GruParams backward;

    std::size_t hidden() const { return forward.hidden(); }
    std::size_t input() const { return forward.input(); }
    std::size_t output() const { return 2 * hidden(); }

    static BiGruLayer zeros(std::size_t hidden, std::size_t input) {
        return {GruParams::zeros(hidden, input), GruParams::zeros(hidden, input)};
    }

    void validate() const {
        forward.validate();
        backward.validate();
        detail::require_same_shape(forward.w_z, backward.w_z, "bigru forward/backward");
    }
};

/// output[t] = [h_fwd(t), h_bwd(t)]; the backward GRU consumes the sequence
/// from t = T-1 down to 0 and its states are stored at their original index.
/// Both directions start from the zero vector.
inline std::vector<Tensor> bigru_forward(std::span<const Tensor> seq, const BiGruLayer& layer) {
    if (seq.empty()) throw DomainError("bigru_forward: empty sequence");
    layer.validate();
    const std::size_t hs = layer.hidden(), n = seq.size();
    for (const auto& x : seq)
        if (x.rank() != 1 || x.dim(0) != layer.input())
            throw DimensionError("bigru_forward: element " + shape_str(x.shape()) + " vs input dim " +
                                 std::to_string(layer.input()));

    std::vector<Tensor> fwd(n), bwd(n);
    Tensor h({hs});
    for (std::size_t t = 0; t < n; ++t) {
        h = gru_step_detailed(seq[t].data(), h.data(), layer.forward).hidden;
        fwd[t] = h;
    }
    h = Tensor({hs});
    for (std::size_t t = n; t-- > 0;) {
        h = gru_step_detailed(seq[t].data(), h.data(), layer.backward).hidden;
        bwd[t] = h;
    }
    std::vector<Tensor> out;
    out.reserve(n);
    for (std::size_t t = 0; t < n; ++t) out.push_back(concat(fwd[t], bwd[t]));
    return out;
}

/// Final-step BiGRU output only: forward pass over all T, backward state after one step.
inline Tensor bigru_last(std::span<const Tensor> seq, const BiGruLayer& layer) {
    if (seq.empty()) throw DomainError("bigru_last: empty sequence");
    const std::size_t hs = layer.hidden();
    Tensor hf({hs});
    for (const auto& x : seq) hf = gru_step_detailed(x.data(), hf.data(), layer.forward).hidden;
    const Tensor zero({hs});
    const Tensor hb = gru_step_detailed(seq.back().data(), zero.data(), layer.backward).hidden;
    return concat(hf, hb);
}

}  // namespace ssanet

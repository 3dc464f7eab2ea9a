#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ssanet/errors.hpp"

namespace ssanet {

using Shape = std::vector<std::size_t>;

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ']';
    return os.str();
}

inline std::size_t shape_size(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>{});
}

/// Dense row-major array of doubles with an explicit shape.
///
/// `data().size() == shape_size(shape())` always holds. Every dimension is
/// positive. A rank-0 tensor is not representable; scalars are shape {1}.
class Tensor {
  public:
    Tensor() : shape_{1}, data_(1, 0.0) {}

    explicit Tensor(Shape shape, double fill = 0.0) : shape_(std::move(shape)) {
        check_shape(shape_);
        data_.assign(shape_size(shape_), fill);
    }

    Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
        check_shape(shape_);
        if (data_.size() != shape_size(shape_))
            throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                                 " does not match shape " + shape_str(shape_));
    }

    /// Rank-1 tensor from a list of values.
    static Tensor vector(std::initializer_list<double> v) {
        return Tensor({v.size()}, std::vector<double>(v));
    }
    static Tensor vector(std::vector<double> v) {
        const std::size_t n = v.size();
        return Tensor({n}, std::move(v));
    }

    /// Rank-2 tensor from nested rows; all rows must have equal length.
    static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r ? rows.begin()->size() : 0;
        std::vector<double> d;
        d.reserve(r * c);
        for (const auto& row : rows) {
            if (row.size() != c) throw DimensionError("ragged matrix literal");
            d.insert(d.end(), row.begin(), row.end());
        }
        return Tensor({r, c}, std::move(d));
    }

    static Tensor identity(std::size_t n) {
        Tensor t({n, n});
        for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = 1.0;
        return t;
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }

    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    double at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }
    double& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }

    /// Same data, new shape of equal element count.
    Tensor reshaped(Shape s) const { return Tensor(std::move(s), data_); }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

  private:
    static void check_shape(const Shape& s) {
        if (s.empty()) throw DimensionError("tensor shape must have rank >= 1");
        for (auto d : s)
            if (d == 0) throw DimensionError("tensor shape " + shape_str(s) + " has a zero dimension");
    }

    Shape shape_;
    std::vector<double> data_;
};

namespace detail {

inline void require_rank(const Tensor& t, std::size_t r, const char* what) {
    if (t.rank() != r)
        throw DimensionError(std::string(what) + ": expected rank " + std::to_string(r) + ", got shape " +
                             shape_str(t.shape()));
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (a.shape() != b.shape())
        throw DimensionError(std::string(what) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
}

template <class F>
Tensor map(const Tensor& x, F f) {
    Tensor y(x.shape());
    auto in = x.data();
    auto out = y.data();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
    return y;
}

}  // namespace detail

/// Logistic function, evaluated so that large |x| never overflows.
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
    detail::require_rank(a, 2, "matmul lhs");
    detail::require_rank(b, 2, "matmul rhs");
    if (a.dim(1) != b.dim(0))
        throw DimensionError("matmul: inner dimensions differ, " + shape_str(a.shape()) + " x " +
                             shape_str(b.shape()));
    const std::size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
    Tensor c({n, m});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a.at(i, p);
            for (std::size_t j = 0; j < m; ++j) c.at(i, j) += aip * b.at(p, j);
        }
    return c;
}

/// Matrix [rows, cols] times vector [cols].
inline Tensor matvec(const Tensor& w, std::span<const double> x) {
    detail::require_rank(w, 2, "matvec");
    if (w.dim(1) != x.size())
        throw DimensionError("matvec: matrix " + shape_str(w.shape()) + " vs vector length " +
                             std::to_string(x.size()));
    Tensor y({w.dim(0)});
    for (std::size_t i = 0; i < w.dim(0); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += w.at(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline Tensor sigmoid(const Tensor& x) { return detail::map(x, [](double v) { return sigmoid(v); }); }
inline Tensor tanh_map(const Tensor& x) { return detail::map(x, [](double v) { return std::tanh(v); }); }
inline Tensor relu(const Tensor& x) { return detail::map(x, [](double v) { return v > 0.0 ? v : 0.0; }); }

inline Tensor hadamard(const Tensor& a, const Tensor& b) {
    detail::require_same_shape(a, b, "hadamard");
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] * b[i];
    return y;
}

inline Tensor add(const Tensor& a, const Tensor& b) {
    detail::require_same_shape(a, b, "add");
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] + b[i];
    return y;
}

/// Concatenate along `axis`; every other dimension must match.
inline Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis = 0) {
    if (a.rank() != b.rank() || axis >= a.rank())
        throw DimensionError("concat: incompatible ranks " + shape_str(a.shape()) + " and " +
                             shape_str(b.shape()) + " on axis " + std::to_string(axis));
    for (std::size_t d = 0; d < a.rank(); ++d)
        if (d != axis && a.dim(d) != b.dim(d))
            throw DimensionError("concat: off-axis mismatch " + shape_str(a.shape()) + " vs " +
                                 shape_str(b.shape()));
    Shape s = a.shape();
    s[axis] += b.dim(axis);
    // Treat each operand as [outer, axis * inner] blocks.
    std::size_t outer = 1, inner = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= a.dim(d);
    for (std::size_t d = axis + 1; d < a.rank(); ++d) inner *= a.dim(d);
    const std::size_t ablk = a.dim(axis) * inner, bblk = b.dim(axis) * inner;
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    for (std::size_t o = 0; o < outer; ++o) {
        auto ad = a.data().subspan(o * ablk, ablk);
        auto bd = b.data().subspan(o * bblk, bblk);
        out.insert(out.end(), ad.begin(), ad.end());
        out.insert(out.end(), bd.begin(), bd.end());
    }
    return Tensor(std::move(s), std::move(out));
}

/// Sub-range [begin, end) along `axis`.
inline Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end) {
    if (axis >= a.rank() || begin >= end || end > a.dim(axis))
        throw DimensionError("slice: range [" + std::to_string(begin) + "," + std::to_string(end) +
                             ") invalid for shape " + shape_str(a.shape()));
    std::size_t outer = 1, inner = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= a.dim(d);
    for (std::size_t d = axis + 1; d < a.rank(); ++d) inner *= a.dim(d);
    Shape s = a.shape();
    s[axis] = end - begin;
    std::vector<double> out;
    out.reserve(outer * (end - begin) * inner);
    for (std::size_t o = 0; o < outer; ++o) {
        auto blk = a.data().subspan((o * a.dim(axis) + begin) * inner, (end - begin) * inner);
        out.insert(out.end(), blk.begin(), blk.end());
    }
    return Tensor(std::move(s), std::move(out));
}

}  // namespace ssanet

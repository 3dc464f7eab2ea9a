#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ssanet/errors.hpp"
#include "ssanet/ssa.hpp"

namespace ssanet::bench {

/// sum x_j^2, minimum 0 at the origin.
inline double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

/// 10 d + sum (x_j^2 - 10 cos(2 pi x_j)), minimum 0 at the origin.
inline double rastrigin(std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
}

/// sum 100 (x_{j+1} - x_j^2)^2 + (1 - x_j)^2, minimum 0 at (1, ..., 1).
inline double rosenbrock(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
        const double a = x[j + 1] - x[j] * x[j];
        const double b = 1.0 - x[j];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> n{"sphere", "rastrigin", "rosenbrock"};
    return n;
}

/// Registry lookup. Bounds: sphere [-5, 5], rastrigin [-5.12, 5.12], rosenbrock [-5, 10].
inline Objective make(const std::string& name, std::size_t dim) {
    auto box = [&](double lo, double hi, ObjectiveFn f) {
        return Objective{name, std::vector<double>(dim, lo), std::vector<double>(dim, hi), std::move(f)};
    };
    if (name == "sphere") return box(-5.0, 5.0, sphere);
    if (name == "rastrigin") return box(-5.12, 5.12, rastrigin);
    if (name == "rosenbrock") return box(-5.0, 10.0, rosenbrock);
    throw LookupError("unknown objective '" + name + "' (known: sphere, rastrigin, rosenbrock)");
}

}  // namespace ssanet::bench

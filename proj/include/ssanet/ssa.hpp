#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ssanet/errors.hpp"
#include "ssanet/prng.hpp"

namespace ssanet {

// Sparrow Search Algorithm, minimisation convention throughout.
//
// Each iteration sorts the population by fitness and then updates three
// roles in a fixed draw order:
//   1. producers (ranks 1..np):     global search, decay towards the origin
//                                  while the alarm value stays below ST
//   2. followers (ranks np+1..n):   local search around the elitist best,
//                                  or a jump away when poorly ranked
//   3. alerters (random subset):    perturbation when danger is perceived
// Every updated coordinate is clamped to the box bounds.

struct SsaConfig {
    std::size_t pop_size = 30;
    std::size_t iter_max = 100;
    std::vector<double> lower;
    std::vector<double> upper;
    double safety_threshold = 0.8;  // ST
    double producer_fraction = 0.2;
    double alerter_fraction = 0.2;
    std::uint64_t seed = 0;
    std::size_t threads = 1;  // fitness evaluation only; never changes results

    std::size_t dim() const noexcept { return lower.size(); }

    std::size_t producer_count() const {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(producer_fraction * double(pop_size))));
    }
    std::size_t alerter_count() const {
        return static_cast<std::size_t>(std::lround(alerter_fraction * double(pop_size)));
    }

    /// Same [lo, hi] box in every one of `dim` coordinates.
    static SsaConfig box(std::size_t dim, double lo, double hi) {
        SsaConfig c;
        c.lower.assign(dim, lo);
        c.upper.assign(dim, hi);
        return c;
    }

    void validate() const {
        if (pop_size < 2) throw ConfigError("ssa pop_size must be >= 2");
        if (lower.empty() || lower.size() != upper.size())
            throw ConfigError("ssa bounds must be non-empty and of equal length");
        for (std::size_t j = 0; j < lower.size(); ++j)
            if (!(lower[j] < upper[j]))
                throw ConfigError("ssa bounds: lower < upper violated in dimension " + std::to_string(j));
        if (!(safety_threshold > 0.5 && safety_threshold < 1.0))
            throw ConfigError("ssa safety_threshold must lie in (0.5, 1)");
        if (!(producer_fraction > 0.0 && producer_fraction < 1.0) || producer_fraction * double(pop_size) < 1.0)
            throw ConfigError("ssa producer_fraction * pop_size must be >= 1 and the fraction < 1");
        if (producer_count() >= pop_size) throw ConfigError("ssa needs at least one follower");
        if (!(alerter_fraction >= 0.1 && alerter_fraction <= 0.3))
            throw ConfigError("ssa alerter_fraction must lie in [0.1, 0.3]");
        if (threads == 0) throw ConfigError("ssa threads must be >= 1");
    }
};

inline void clamp_to_bounds(std::span<double> x, const SsaConfig& cfg) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], cfg.lower[j], cfg.upper[j]);
}

namespace detail {

// alpha ~ U(0,1) with 0 rejected
template <RandomSource R>
double positive_uniform(R& rng) {
    double a = rng.uniform();
    while (a == 0.0) a = rng.uniform();
    return a;
}

}  // namespace detail

/// Producer move for the sparrow at 1-based fitness rank `rank`.
///
/// Draws R2 ~ U(0,1); if R2 < ST draws alpha and scales every coordinate
/// by exp(-rank / (alpha * iter_max)); otherwise draws one Q ~ N(0,1) and
/// shifts every coordinate by Q (L is the all-ones vector).
template <RandomSource R>
std::vector<double> producer_update(std::span<const double> x, std::size_t rank, const SsaConfig& cfg, R& rng) {
    std::vector<double> y(x.begin(), x.end());
    const double r2 = rng.uniform();
    if (r2 < cfg.safety_threshold) {
        const double alpha = detail::positive_uniform(rng);
        const double decay = std::exp(-static_cast<double>(rank) / (alpha * static_cast<double>(cfg.iter_max)));
        for (auto& v : y) v *= decay;
    } else {
        const double q = rng.normal();
        for (auto& v : y) v += q;
    }
    clamp_to_bounds(y, cfg);
    return y;
}

/// Follower move for the sparrow at 1-based fitness rank `rank`.
///
/// rank > n/2: draws Q ~ N(0,1) then alpha, and sets
///   x_j = Q * exp((worst_j - x_j) / (alpha * iter_max)).
/// The denominator is alpha * iter_max as printed, not the rank-squared
/// form found in some SSA write-ups.
/// rank <= n/2: draws d signs A_j = +-1 (u < 0.5 gives -1) and sets
///   x_j = best_j + |x_j - best_j| * A_j / d,
/// which is A^+ = A^T (A A^T)^-1 applied componentwise.
template <RandomSource R>
std::vector<double> follower_update(std::span<const double> x, std::size_t rank, std::span<const double> best,
                                    std::span<const double> worst, const SsaConfig& cfg, R& rng) {
    const std::size_t d = x.size();
    std::vector<double> y(d);
    if (2 * rank > cfg.pop_size) {
        const double q = rng.normal();
        const double alpha = detail::positive_uniform(rng);
        const double denom = alpha * static_cast<double>(cfg.iter_max);
        for (std::size_t j = 0; j < d; ++j) y[j] = q * std::exp((worst[j] - x[j]) / denom);
    } else {
        const double inv_d = 1.0 / static_cast<double>(d);
        for (std::size_t j = 0; j < d; ++j) {
            const double a = rng.uniform() < 0.5 ? -1.0 : 1.0;
            y[j] = best[j] + std::abs(x[j] - best[j]) * a * inv_d;
        }
    }
    clamp_to_bounds(y, cfg);
    return y;
}

/// Alerter move.
///
/// f_i > f_g (periphery): one beta ~ N(0,1), x_j = best_j + beta * |x_j - best_j|.
/// f_i == f_g (centre): one k ~ U(-1,1),
///   x_j = x_j + k * |x_j - worst_j| / (f_i - f_w + eps).
/// The printed centre rule has no displacement term and is anchored at the
/// best position; here the step is scaled by the distance to the worst
/// sparrow and anchored at the sparrow's own position.
template <RandomSource R>
std::vector<double> alerter_update(std::span<const double> x, double f_i, double f_g, double f_w,
                                   std::span<const double> best, std::span<const double> worst,
                                   const SsaConfig& cfg, R& rng) {
    constexpr double eps = 1e-50;
    const std::size_t d = x.size();
    std::vector<double> y(d);
    if (f_i > f_g) {
        const double beta = rng.normal();
        for (std::size_t j = 0; j < d; ++j) y[j] = best[j] + beta * std::abs(x[j] - best[j]);
    } else {
        const double k = 2.0 * rng.uniform() - 1.0;
        const double denom = f_i - f_w + eps;
        for (std::size_t j = 0; j < d; ++j) y[j] = x[j] + k * (std::abs(x[j] - worst[j]) / denom);
    }
    clamp_to_bounds(y, cfg);
    return y;
}

/// Positions (n x d, row-major), their fitness, and the elitist record.
struct SparrowPopulation {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> positions;
    std::vector<double> fitness;
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::vector<double> worst_position;
    double worst_fitness = 0.0;
    std::size_t iteration = 0;

    std::span<const double> row(std::size_t i) const { return {positions.data() + i * d, d}; }
    std::span<double> row(std::size_t i) { return {positions.data() + i * d, d}; }
};

/// Which sparrows took which role in one step (indices into the pre-step population).
struct StepRoles {
    std::vector<std::size_t> producers;
    std::vector<std::size_t> followers;
    std::vector<std::size_t> alerters;
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// A pure function to minimise plus its natural search box.
struct Objective {
    std::string name;
    std::vector<double> lower;
    std::vector<double> upper;
    ObjectiveFn evaluate;

    std::size_t dim() const noexcept { return lower.size(); }
    double operator()(std::span<const double> x) const { return evaluate(x); }
};

namespace detail {

inline std::string position_str(std::span<const double> x) {
    std::ostringstream os;
    os.precision(17);
    os << '[';
    for (std::size_t j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x[j];
    os << ']';
    return os.str();
}

// Evaluates every row; results land by index so the thread count never
// changes the outcome.
template <class F>
void evaluate_all(SparrowPopulation& pop, const F& f, std::size_t threads) {
    pop.fitness.assign(pop.n, 0.0);
    auto eval_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) pop.fitness[i] = f(pop.row(i));
    };
    threads = std::clamp<std::size_t>(threads, 1, pop.n);
    if (threads == 1) {
        eval_range(0, pop.n);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (pop.n + threads - 1) / threads;
            for (std::size_t t = 0; t < threads; ++t)
                pool.emplace_back([&, t] {
                    try {
                        eval_range(std::min(pop.n, t * chunk), std::min(pop.n, (t + 1) * chunk));
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    for (std::size_t i = 0; i < pop.n; ++i)
        if (!std::isfinite(pop.fitness[i]))
            throw EvaluationError("objective returned non-finite value " + std::to_string(pop.fitness[i]) +
                                  " at position " + position_str(pop.row(i)));
}

inline void refresh_extremes(SparrowPopulation& pop, bool first) {
    std::size_t bi = 0, wi = 0;
    for (std::size_t i = 1; i < pop.n; ++i) {
        if (pop.fitness[i] < pop.fitness[bi]) bi = i;
        if (pop.fitness[i] > pop.fitness[wi]) wi = i;
    }
    if (first || pop.fitness[bi] < pop.best_fitness) {
        pop.best_fitness = pop.fitness[bi];
        auto r = pop.row(bi);
        pop.best_position.assign(r.begin(), r.end());
    }
    pop.worst_fitness = pop.fitness[wi];
    auto w = pop.row(wi);
    pop.worst_position.assign(w.begin(), w.end());
}

}  // namespace detail

/// Uniform positions inside the bounds (sparrow-major draw order), evaluated.
template <class F>
SparrowPopulation ssa_initialize(const F& f, const SsaConfig& cfg, Prng& rng) {
    cfg.validate();
    SparrowPopulation pop;
    pop.n = cfg.pop_size;
    pop.d = cfg.dim();
    pop.positions.resize(pop.n * pop.d);
    for (std::size_t i = 0; i < pop.n; ++i)
        for (std::size_t j = 0; j < pop.d; ++j)
            pop.positions[i * pop.d + j] = cfg.lower[j] + (cfg.upper[j] - cfg.lower[j]) * rng.uniform();
    detail::evaluate_all(pop, f, cfg.threads);
    detail::refresh_extremes(pop, true);
    return pop;
}

/// One SSA iteration. Sort ascending by fitness (ties by index), update
/// producers, then followers, then a random alerter subset, re-evaluate,
/// and keep the elitist best.
template <class F, RandomSource R>
SparrowPopulation ssa_step(const SparrowPopulation& pop, const F& f, const SsaConfig& cfg, R& rng,
                           StepRoles* roles = nullptr) {
    const std::size_t n = pop.n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop.fitness[a] < pop.fitness[b]; });

    SparrowPopulation next = pop;
    const std::size_t np = cfg.producer_count();
    const auto best = std::span<const double>(pop.best_position);
    const auto worst = std::span<const double>(pop.worst_position);
    if (roles) *roles = StepRoles{};

    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t idx = order[r];
        const std::size_t rank = r + 1;
        auto moved = r < np ? producer_update(pop.row(idx), rank, cfg, rng)
                            : follower_update(pop.row(idx), rank, best, worst, cfg, rng);
        std::copy(moved.begin(), moved.end(), next.row(idx).begin());
        if (roles) (r < np ? roles->producers : roles->followers).push_back(idx);
    }

    // partial Fisher-Yates picks the alerters
    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    const std::size_t na = std::min(cfg.alerter_count(), n);
    for (std::size_t a = 0; a < na; ++a) {
        const std::size_t j = a + static_cast<std::size_t>(rng.uniform() * double(n - a));
        std::swap(pick[a], pick[std::min(j, n - 1)]);
    }
    for (std::size_t a = 0; a < na; ++a) {
        const std::size_t idx = pick[a];
        std::vector<double> cur(next.row(idx).begin(), next.row(idx).end());
        auto moved = alerter_update(cur, pop.fitness[idx], pop.best_fitness, pop.worst_fitness, best, worst, cfg, rng);
        std::copy(moved.begin(), moved.end(), next.row(idx).begin());
        if (roles) roles->alerters.push_back(idx);
    }

    detail::evaluate_all(next, f, cfg.threads);
    detail::refresh_extremes(next, false);
    ++next.iteration;
    return next;
}

struct SsaResult {
    std::vector<double> best_position;
    double best_fitness = 0.0;
    /// history[0] is the best of the initial population, history[t] the elitist best after step t.
    std::vector<double> history;
};

/// Full run: initialise from cfg.seed, then iter_max steps. `on_iteration`
/// (optional) sees the population after initialisation and after each step.
template <class F>
SsaResult ssa_optimize(const F& f, const SsaConfig& cfg,
                       const std::function<void(const SparrowPopulation&)>& on_iteration = {}) {
    cfg.validate();
    Prng rng(cfg.seed);
    SparrowPopulation pop = ssa_initialize(f, cfg, rng);
    SsaResult res;
    res.history.reserve(cfg.iter_max + 1);
    res.history.push_back(pop.best_fitness);
    if (on_iteration) on_iteration(pop);
    for (std::size_t t = 0; t < cfg.iter_max; ++t) {
        pop = ssa_step(pop, f, cfg, rng);
        res.history.push_back(pop.best_fitness);
        if (on_iteration) on_iteration(pop);
    }
    res.best_position = pop.best_position;
    res.best_fitness = pop.best_fitness;
    return res;
}

}  // namespace ssanet

#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>

namespace ssanet {

/// One splitmix64 output step applied to `x` without keeping state.
constexpr std::uint64_t splitmix64_mix(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed for an independent child stream: splitmix64(parent ^ stream_index).
constexpr std::uint64_t child_seed(std::uint64_t parent, std::uint64_t stream_index) noexcept {
    return splitmix64_mix(parent ^ stream_index);
}

/// Anything the optimizer and generators can draw from.
///
/// `uniform()` is U[0,1), `normal()` is N(0,1). The SSA update rules take
/// this as a template parameter so tests can inject recorded values.
template <class R>
concept RandomSource = requires(R& r) {
    { r.uniform() } -> std::convertible_to<double>;
    { r.normal() } -> std::convertible_to<double>;
};

/// Deterministic splitmix64 stream.
///
/// uniform(): top 53 bits of one output scaled by 2^-53.
/// normal(): Box-Muller cosine branch, consuming exactly two uniforms
/// (u1 first, u2 second); the sine partner is discarded so the draw order
/// never depends on call history.
class Prng {
  public:
    explicit Prng(std::uint64_t seed = 0) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    double normal() noexcept {
        const double u1 = 1.0 - uniform();  // (0,1], keeps log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, n). Multiply-shift; n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    std::uint64_t state() const noexcept { return state_; }

  private:
    std::uint64_t state_;
};

static_assert(RandomSource<Prng>);

}  // namespace ssanet

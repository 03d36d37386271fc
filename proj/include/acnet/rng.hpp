#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <span>

namespace acnet {

//! SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

//! Counter-based generator: output i of stream (seed, stream) is
//! mix64(key + (i + 1) * golden), key = mix64(seed ^ mix64(stream + golden)).
//!
//! Any (seed, stream, position) triple is addressable without replaying the
//! sequence, so per-point and per-epoch streams stay reproducible regardless of
//! how work is split. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(seed ^ mix64(stream + kGolden)))
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + (++counter_) * kGolden); }

    //! Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    //! Unit exponential by inversion.
    double exponential() { return -std::log1p(-uniform()); }

    //! Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

    std::uint64_t position() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

//! Fisher-Yates shuffle driven by CounterRng (std::shuffle is not portable
//! across standard libraries).
template <class T>
void shuffle(std::span<T> items, CounterRng& rng)
{
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace acnet

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace resobs {

/// One SplitMix64 output; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Combines two 64-bit words into a well-mixed seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

/// FNV-1a of a name. Stable across platforms, unlike std::hash.
std::uint64_t hash_name(std::string_view name) noexcept;

/// Per-trial seed that depends only on the trial's position in a sweep,
/// never on execution order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view parameter,
                          std::size_t value_index, std::size_t trial_index) noexcept;

/// Independent sub-streams of one configuration seed.
enum class Stream : std::uint64_t {
    Skeleton = 1,
    Weights = 2,
    Input = 3,
    Spectral = 4,
};

std::uint64_t stream_seed(std::uint64_t seed, Stream stream) noexcept;

/// Seeded generator whose outputs are identical on every standard library.
/// std::uniform_real_distribution is implementation-defined, so the
/// conversions from engine bits are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform01() noexcept {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    /// Uniform integer on [0, bound); bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::mt19937_64 engine_;
};

} // namespace resobs

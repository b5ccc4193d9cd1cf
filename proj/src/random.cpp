#include "resobs/random.hpp"

namespace resobs {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t state = a;
    std::uint64_t first = splitmix64(state);
    state = first ^ b;
    return splitmix64(state);
}

std::uint64_t hash_name(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : name) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view parameter,
                          std::size_t value_index, std::size_t trial_index) noexcept {
    std::uint64_t s = mix_seed(master_seed, hash_name(parameter));
    s = mix_seed(s, static_cast<std::uint64_t>(value_index));
    return mix_seed(s, static_cast<std::uint64_t>(trial_index));
}

std::uint64_t stream_seed(std::uint64_t seed, Stream stream) noexcept {
    return mix_seed(seed, static_cast<std::uint64_t>(stream));
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
    // Rejection sampling keeps the result unbiased.
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % bound);
    std::uint64_t draw;
    do {
        draw = engine_();
    } while (draw >= limit);
    return draw % bound;
}

} // namespace resobs

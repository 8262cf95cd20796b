#ifndef VRNAV_RANDOM_HPP
#define VRNAV_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace vrnav
{

using Rng = std::mt19937_64;

/// Independent stream for (seed, tags...). Same inputs, same stream, no shared state.
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags = {})
{
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * tags.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto t : tags)
        push(t);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

/// Stream tags, so unrelated consumers of one seed never share draws.
enum class Stream : std::uint64_t
{
    Init = 1,
    Population = 2,
    Episodes = 3,
    VisionNoise = 4,
    Validation = 5,
    Test = 6,
};

constexpr std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

} // namespace vrnav

#endif // VRNAV_RANDOM_HPP

#ifndef PCBO_RNG_HPP
#define PCBO_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pcbo {

/// Purposes that get their own stream when deriving seeds.
enum class StreamPurpose : std::uint64_t {
    Dag = 1,
    Weights = 2,
    Data = 3,
    Method = 4,
    Test = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Hashes a base seed together with a path of tags, e.g.
/// derive_seed(base, {replica, scenario, StreamPurpose::Data}).
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = splitmix64(base);
    for (std::uint64_t t : tags) {
        h = splitmix64(h ^ splitmix64(t + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

inline std::uint64_t tag(StreamPurpose p) { return static_cast<std::uint64_t>(p); }

/// A seeded random source. Streams never share state; sub-streams are derived
/// from the seed, not from the engine's position.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    RngStream child(std::initializer_list<std::uint64_t> tags) const {
        return RngStream(derive_seed(seed_, tags));
    }

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& engine() { return engine_; }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return normal_(engine_); }
    bool bernoulli(double prob) { return uniform() < prob; }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pcbo

#endif  // PCBO_RNG_HPP

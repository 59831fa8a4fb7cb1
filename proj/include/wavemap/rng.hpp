#ifndef WAVEMAP_RNG_HPP
#define WAVEMAP_RNG_HPP

#include <cstdint>

namespace wavemap {

// Counter-based generator: the stream for (seed, key) is SplitMix64 started from a
// mix of both, so independent trials can be generated in any order or in parallel.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t key) : state_(mix(seed ^ mix(key + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }
    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // uniform integer in [lo, hi]
    long integer(long lo, long hi) { return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

} // namespace wavemap

#endif

#ifndef QUDITMBC_RNG_HPP
#define QUDITMBC_RNG_HPP

#include <cstdint>

namespace qmbc {

// SplitMix64. Counter-style: cheap to construct, so every Monte Carlo trial
// gets its own generator derived from (seed, stream) and results do not
// depend on thread count or iteration order.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // unbiased uniform in [0,n)
    int next_below(int n) {
        uint64_t bound = ~uint64_t(0) - (~uint64_t(0) % uint64_t(n));
        uint64_t r;
        do {
            r = next();
        } while (r >= bound);
        return static_cast<int>(r % uint64_t(n));
    }
};

// derive an independent stream from a master seed
inline SplitMix64 make_stream(uint64_t seed, uint64_t stream) {
    SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    g.next();
    return g;
}

inline const char* rng_name() { return "splitmix64"; }

}  // namespace qmbc

#endif

#ifndef PASIM_RNG_HPP
#define PASIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace pasim {

// splitmix64 step; used for seed derivation so that independent streams
// can be spawned from one master seed without correlation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(master ^ 0xA02BDBF7BB3C0A7ULL);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    return splitmix64(s ^ c);
}

// Seeded random source. Distribution sampling is hand-rolled on top of
// mt19937_64 so that streams are reproducible independent of the standard
// library's distribution implementations.
class RandomSource {
  public:
    explicit RandomSource(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t u64() { return gen_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be nonzero.
    std::uint64_t below(std::uint64_t n) { return u64() % n; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Exponential with the given rate (mean 1/rate).
    double exponential(double rate) {
        double u = uniform01();
        return -std::log1p(-u) / rate;
    }

    // Standard normal via Box-Muller; one spare kept between calls.
    double gaussian() {
        if (haveSpare_) {
            haveSpare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        haveSpare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool haveSpare_ = false;
};

} // namespace pasim

#endif

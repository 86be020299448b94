#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace canonmap {

// Splittable 64-bit generator (splitmix64 core). All randomized code in the
// library draws from this so that results are bit-reproducible for a given
// seed, independent of the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1); safe as a log() argument.
    double uniform_open() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform in (lo, hi).
    double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // Standard normal via Box-Muller; no cached second value, so the draw
    // sequence is a pure function of the call sequence.
    double gauss() {
        const double two_pi = 6.283185307179586476925287;
        double u1 = uniform_open();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Complex standard normal (unit total variance).
    std::complex<double> cgauss() {
        double re = gauss();
        double im = gauss();
        return {re * 0.7071067811865476, im * 0.7071067811865476};
    }

    // Independent child stream; pure function of (current state, tag).
    Rng split(std::uint64_t tag) const {
        Rng child(state_ ^ (0xA0761D6478BD642FULL * (tag + 1)));
        child.next();
        return child;
    }

private:
    std::uint64_t state_;
};

}  // namespace canonmap

#ifndef CODINE_RNG_HPP
#define CODINE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "codine/matrix.hpp"

namespace codine {

// All randomness flows through these helpers so that a run is reproducible
// from its seed alone. Uniform and normal variates are generated from the
// raw engine bits instead of std::*_distribution, whose output is
// implementation-defined.

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

// splitmix64 step; used to derive independent sub-stream seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform on the open interval (0,1): (k + 0.5) / 2^53 with k a 53-bit draw.
// Never returns 0 or 1 exactly.
inline double uniform_open(std::mt19937_64 &rng) {
    const std::uint64_t k = rng() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller on open-interval uniforms.
class NormalSampler {
  public:
    double operator()(std::mt19937_64 &rng) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open(rng);
        const double u2 = uniform_open(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline Matrix uniform_matrix(std::size_t rows, std::size_t cols, std::mt19937_64 &rng) {
    Matrix m(rows, cols);
    for (double &v : m.data()) v = uniform_open(rng);
    return m;
}

inline Matrix normal_matrix(std::size_t rows, std::size_t cols, std::mt19937_64 &rng) {
    Matrix m(rows, cols);
    NormalSampler gauss;
    for (double &v : m.data()) v = gauss(rng);
    return m;
}

}  // namespace codine

#endif  // CODINE_RNG_HPP

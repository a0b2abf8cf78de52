#ifndef QLAP_SAMPLING_HPP
#define QLAP_SAMPLING_HPP

#include <qlap/radial.hpp>

#include <cstdint>

namespace qlap {

/// SplitMix64: tiny deterministic generator, identical stream on every
/// platform for a given seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Log-uniform in [a, b), a, b > 0.
    double log_uniform(double a, double b);

  private:
    std::uint64_t state_;
};

/// exp(-(r/width)²) on the given grid.
RadialFn gaussian_profile(const GridPtr& grid, double width);

/// Smooth random mixture of 2–4 signed Gaussian bumps with widths and
/// centers drawn inside [0, r_max/2]. Used as generic test material.
RadialFn random_bump_mixture(const GridPtr& grid, Rng& rng);

/// Nonnegative decreasing random profile (rearranged bump mixture shape).
RadialFn random_decreasing_profile(const GridPtr& grid, Rng& rng);

} // namespace qlap

#endif

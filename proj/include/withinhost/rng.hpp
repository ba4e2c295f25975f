#ifndef WITHINHOST_RNG_HPP
#define WITHINHOST_RNG_HPP

#include <cmath>
#include <cstdint>

namespace withinhost {

/// Counter-based 64-bit generator (splitmix64 finalizer applied to
/// seed-offset counter). Chosen over <random> engines because the standard
/// distributions are not bit-reproducible across library implementations and
/// synthetic datasets must be seed-stable everywhere.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (counter_++) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in (0, 1]: never zero, so it is safe under log().
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second value of each pair is
    /// cached so consecutive calls consume exactly one pair per two draws.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Exponential with unit mean.
    double next_exponential() { return -std::log(next_unit()); }

    /// Multiplicative lognormal factor with mean 1 and coefficient of
    /// variation cv: sigma^2 = ln(1+cv^2), mu = -sigma^2/2.
    double next_lognormal_factor(double cv) {
        if (cv <= 0.0) {
            return 1.0;
        }
        const double sigma2 = std::log1p(cv * cv);
        const double sigma = std::sqrt(sigma2);
        return std::exp(-0.5 * sigma2 + sigma * next_normal());
    }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace withinhost

#endif

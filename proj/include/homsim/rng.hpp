#ifndef HOMSIM_RNG_HPP
#define HOMSIM_RNG_HPP

#include <cmath>
#include <cstdint>

#include "homsim/constants.hpp"
#include "homsim/errors.hpp"

namespace homsim {

// Counter-based deterministic generator. Every output is a pure function of
// (seed, stream, counter), so identical inputs reproduce identical draws on
// every run regardless of call interleaving; streams are independent lanes
// keyed by e.g. a scan-point index.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    // splitmix64 finalizer; full-avalanche 64-bit mix.
    static constexpr std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Stateless hash of (seed, stream, counter).
    static constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t counter) {
        return mix(mix(mix(seed) ^ (stream * 0xd6e8feb86659fd93ULL)) ^ counter);
    }

    std::uint64_t next_u64() { return at(seed_, stream_, counter_++); }

    // Uniform double in [0, 1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform phase in [0, 2*pi).
    double next_phase() { return kTwoPi * next_unit(); }

    // Poisson deviate. Sequential inversion for small means, transformed
    // rejection (PTRS, Hoermann 1993) for large ones.
    std::uint64_t next_poisson(double mean) {
        if (!(mean >= 0.0) || !std::isfinite(mean))
            throw invalid_parameter("poisson mean must be finite and >= 0");
        if (mean == 0.0) return 0;
        return mean < 10.0 ? poisson_inversion(mean) : poisson_ptrs(mean);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    std::uint64_t poisson_inversion(double mean) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_unit();
        } while (p > limit);
        return k - 1;
    }

    std::uint64_t poisson_ptrs(double mean) {
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            const double u = next_unit() - 0.5;
            const double v = next_unit();
            const double us = 0.5 - std::fabs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                kf * log_mean - mean - std::lgamma(kf + 1.0))
                return static_cast<std::uint64_t>(kf);
        }
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

// Derived per-point seed for record keeping: collapses (master seed, index)
// into the single seed field a CountRecord carries.
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::uint64_t index) {
    return CounterRng::mix(CounterRng::mix(master) ^
                           (index * 0xbf58476d1ce4e5b9ULL));
}

}  // namespace homsim

#endif  // HOMSIM_RNG_HPP

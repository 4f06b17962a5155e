// Counter-based generator: reproducibility and Poisson sampling statistics.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "homsim/rng.hpp"

using homsim::CounterRng;

TEST_CASE("identical (seed, stream) reproduce identical sequences") {
    CounterRng a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("outputs are a pure function of (seed, stream, counter)") {
    CounterRng rng(123, 5);
    for (std::uint64_t i = 0; i < 20; ++i)
        REQUIRE(rng.next_u64() == CounterRng::at(123, 5, i));
}

TEST_CASE("different streams decorrelate") {
    CounterRng a(42, 0), b(42, 1);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    REQUIRE(equal == 0);
}

TEST_CASE("unit doubles stay in [0,1) and fill the range") {
    CounterRng rng(9);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    REQUIRE(lo < 0.01);
    REQUIRE(hi > 0.99);
}

TEST_CASE("poisson with zero mean is identically zero") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        CounterRng rng(seed);
        REQUIRE(rng.next_poisson(0.0) == 0);
    }
}

TEST_CASE("poisson mean matches over many seeds") {
    // Standard error of the sample mean of N Poisson(mu) draws is
    // sqrt(mu / N); the sample mean must land within three of them.
    const double mu = 400.0;
    const int n = 10000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        CounterRng rng(777, static_cast<std::uint64_t>(i));
        sum += static_cast<double>(rng.next_poisson(mu));
    }
    const double mean = sum / n;
    REQUIRE(std::fabs(mean - mu) <= 3.0 * std::sqrt(mu / n));
}

TEST_CASE("poisson variance tracks the mean (Fano factor 1)") {
    const double mu = 400.0;
    const int n = 10000;
    std::vector<double> draws;
    draws.reserve(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        CounterRng rng(31337, static_cast<std::uint64_t>(i));
        draws.push_back(static_cast<double>(rng.next_poisson(mu)));
        sum += draws.back();
    }
    const double mean = sum / n;
    double var = 0.0;
    for (double d : draws) var += (d - mean) * (d - mean);
    var /= n - 1;
    REQUIRE(var / mean == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("poisson inversion branch (small mean) is unbiased") {
    const double mu = 3.0;
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        CounterRng rng(555, static_cast<std::uint64_t>(i));
        sum += static_cast<double>(rng.next_poisson(mu));
    }
    REQUIRE(sum / n == Catch::Approx(mu).margin(3.0 * std::sqrt(mu / n)));
}

TEST_CASE("poisson rejects invalid means") {
    CounterRng rng(1);
    REQUIRE_THROWS_AS(rng.next_poisson(-1.0), homsim::invalid_parameter);
}

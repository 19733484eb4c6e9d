#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "metasim/rng.hpp"

using namespace metasim;

TEST_CASE("identical seeds give identical sequences") {
    RandomStream a(12345), b(12345);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("stream_seed decorrelates adjacent ids and seeds") {
    CHECK(stream_seed(1, 0) != stream_seed(1, 1));
    CHECK(stream_seed(1, 0) != stream_seed(2, 0));
    CHECK(stream_seed(0, 0) != 0);
    // Streams derived for adjacent master seeds must not collide either.
    RandomStream a(stream_seed(7, 0)), b(stream_seed(8, 0));
    int same = 0;
    for (int i = 0; i < 64; ++i) {
        if (a.next_u64() == b.next_u64()) ++same;
    }
    CHECK(same == 0);
}

TEST_CASE("uniform01 stays in [0,1)") {
    RandomStream rng(99);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("exponential sample mean matches 1/rate") {
    RandomStream rng(7);
    const double rate = 250.0;
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.exponential(rate);
    const double mean = sum / n;
    const double se = (1.0 / rate) / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(mean - 1.0 / rate) < 3.0 * se);
}

TEST_CASE("poisson sample moments match, both sampler regimes") {
    for (const double mean : {0.5, 3.0, 9.9, 10.1, 47.0, 3000.0}) {
        RandomStream rng(static_cast<std::uint64_t>(mean * 1000) + 1);
        const int n = 100000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<double>(rng.poisson(mean));
            CHECK(k >= 0);
            sum += k;
            sum_sq += k * k;
        }
        const double sample_mean = sum / n;
        const double sample_var = sum_sq / n - sample_mean * sample_mean;
        const double se_mean = std::sqrt(mean / n);
        CHECK(std::fabs(sample_mean - mean) < 4.0 * se_mean);
        // Poisson variance equals the mean; allow a loose band.
        CHECK(sample_var > 0.9 * mean);
        CHECK(sample_var < 1.1 * mean);
    }
}

TEST_CASE("poisson zero mean consumes nothing and returns zero") {
    RandomStream a(5), b(5);
    CHECK(a.poisson(0.0) == 0);
    CHECK(a.next_u64() == b.next_u64());
}

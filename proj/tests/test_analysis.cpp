#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "metasim/analysis.hpp"
#include "metasim/rng.hpp"

using namespace metasim;

namespace {

std::vector<double> grid_times(std::size_t n, double dt) {
    std::vector<double> times(n);
    for (std::size_t k = 0; k < n; ++k) times[k] = static_cast<double>(k) * dt;
    return times;
}

/// Builds a single-volume trajectory from explicit prey/predator series.
Trajectory make_trajectory(const std::vector<double>& times, const std::vector<Count>& prey,
                           const std::vector<Count>& predator) {
    Trajectory t;
    t.times = times;
    t.volume_names = {"p0"};
    t.species_names = {"A", "X", "Y"};
    t.counts.resize(1);
    for (std::size_t k = 0; k < times.size(); ++k) {
        t.counts[0].push_back({200, prey[k], predator[k]});
    }
    t.final_time = times.empty() ? 0.0 : times.back();
    return t;
}

} // namespace

TEST_CASE("extinction is the earliest sustained zero") {
    const auto times = grid_times(5, 1.0);
    SUBCASE("zeroes to the end") {
        const std::vector<double> series = {100, 50, 0, 0, 0};
        CHECK(*detect_extinction(times, series) == 2.0);
    }
    SUBCASE("recovery cancels it") {
        const std::vector<double> series = {100, 50, 0, 0, 3};
        CHECK_FALSE(detect_extinction(times, series).has_value());
    }
    SUBCASE("never zero") {
        const std::vector<double> series = {4, 3, 2, 1, 1};
        CHECK_FALSE(detect_extinction(times, series).has_value());
    }
    SUBCASE("zero from the start") {
        const std::vector<double> series = {0, 0, 0, 0, 0};
        CHECK(*detect_extinction(times, series) == 0.0);
    }
}

TEST_CASE("extending a series never moves extinction earlier") {
    RandomStream rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> series;
        for (int k = 0; k < 30; ++k) {
            series.push_back(rng.uniform01() < 0.4 ? 0.0
                                                   : static_cast<double>(1 + rng.next_u64() % 5));
        }
        const auto times_full = grid_times(series.size(), 1.0);
        const std::size_t cut = 5 + rng.next_u64() % 20;
        const auto prefix_time = detect_extinction(
            std::span(times_full).first(cut), std::span<const double>(series).first(cut));
        const auto full_time = detect_extinction(times_full, series);
        if (prefix_time && full_time) CHECK(*full_time >= *prefix_time);
        // prefix none -> full may be anything; prefix some -> full later or none.
    }
}

TEST_CASE("oscillation detector recovers a synthetic period") {
    const double period = 0.444;
    const double dt = 0.01;
    std::vector<double> times, values;
    for (double t = 0.0; t <= 5.0 + 1e-9; t += dt) {
        times.push_back(t);
        values.push_back(1000.0 + 500.0 * std::sin(2.0 * M_PI * t / period));
    }
    const auto result = detect_oscillation(times, values);
    REQUIRE(result.has_value());
    CHECK(result->period == doctest::Approx(period).epsilon(0.0226)); // +-0.01 absolute
    CHECK(result->peak_times.size() >= 10);
    CHECK(result->mean_peak == doctest::Approx(1500.0).epsilon(0.01));
    CHECK(result->amplitude_cv < 0.05);
}

TEST_CASE("constant and monotone series never oscillate") {
    const auto times = grid_times(50, 0.1);
    const std::vector<double> constant(50, 42.0);
    CHECK_FALSE(detect_oscillation(times, constant).has_value());

    RandomStream rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> monotone;
        double level = 0.0;
        for (int k = 0; k < 50; ++k) {
            level += rng.uniform01();
            monotone.push_back(level);
        }
        CHECK_FALSE(detect_oscillation(times, monotone).has_value());
        std::vector<double> reversed(monotone.rbegin(), monotone.rend());
        CHECK_FALSE(detect_oscillation(times, reversed).has_value());
    }
}

TEST_CASE("small bumps below the prominence threshold are ignored") {
    // Mean 100; bumps of 5 are well under 0.2 * mean.
    std::vector<double> values(64, 100.0);
    for (std::size_t k = 4; k < 64; k += 8) values[k] = 105.0;
    const auto times = grid_times(values.size(), 1.0);
    CHECK_FALSE(detect_oscillation(times, values).has_value());
    // The same bumps pass with a permissive threshold.
    CHECK(detect_oscillation(times, values, 0.01).has_value());
}

TEST_CASE("short series are rejected") {
    const auto times = grid_times(7, 1.0);
    const std::vector<double> values = {0, 5, 0, 5, 0, 5, 0};
    CHECK_FALSE(detect_oscillation(times, values).has_value());
}

TEST_CASE("colonization classification on constructed outcomes") {
    const auto times = grid_times(200, 0.1);

    SUBCASE("flat-zero predators means predator-absent") {
        std::vector<Count> prey(200), predator(200, 0);
        for (std::size_t k = 0; k < 200; ++k) prey[k] = 10 + static_cast<Count>(k);
        const auto t = make_trajectory(times, prey, predator);
        const auto outcome = classify_colonization(t, 0, 0);
        CHECK(outcome.classification == PatchClass::PredatorAbsent);
    }
    SUBCASE("established predators with prey oscillation means colonized") {
        std::vector<Count> prey(200), predator(200);
        for (std::size_t k = 0; k < 200; ++k) {
            const double t = times[k];
            predator[k] = k < 20 ? static_cast<Count>(5 * k) : 100;
            prey[k] = static_cast<Count>(500.0 + 300.0 * std::sin(2.0 * M_PI * t / 2.0));
        }
        const auto t2 = make_trajectory(times, prey, predator);
        const auto outcome = classify_colonization(t2, 0, 0);
        CHECK(outcome.classification == PatchClass::Oscillating);
        CHECK(outcome.period_estimate.has_value());
    }
    SUBCASE("prey crash to sustained zero means prey-extinct") {
        std::vector<Count> prey(200), predator(200);
        for (std::size_t k = 0; k < 200; ++k) {
            prey[k] = k < 50 ? 1000 - static_cast<Count>(20 * k) : 0;
            predator[k] = k < 100 ? 200 : 0;
        }
        const auto t3 = make_trajectory(times, prey, predator);
        const auto outcome = classify_colonization(t3, 0, 0);
        CHECK(outcome.classification == PatchClass::PreyExtinct);
        CHECK(outcome.extinction_time.has_value());
    }
    SUBCASE("all-zero predator series is predator-absent for any prey") {
        RandomStream rng(9);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Count> prey(200), predator(200, 0);
            for (auto& p : prey) p = static_cast<Count>(rng.next_u64() % 1000) + 1;
            const auto t4 = make_trajectory(times, prey, predator);
            CHECK(classify_colonization(t4, 0, 0).classification == PatchClass::PredatorAbsent);
        }
    }
    SUBCASE("seeded patch whose prey die while predators flow is dispersal-only") {
        std::vector<Count> prey(200), predator(200);
        for (std::size_t k = 0; k < 200; ++k) {
            prey[k] = k < 30 ? 500 - static_cast<Count>(17 * k) : 0;
            predator[k] = 300 + static_cast<Count>(k % 40);
        }
        const auto t5 = make_trajectory(times, prey, predator);
        const auto outcome = classify_colonization(t5, 0, 1000);
        CHECK(outcome.classification == PatchClass::DispersalOnly);
    }
}

TEST_CASE("symmetry statistic vanishes for identical series") {
    const auto times = grid_times(100, 0.1);
    std::vector<Count> prey(100), predator(100);
    RandomStream rng(23);
    for (std::size_t k = 0; k < 100; ++k) {
        prey[k] = static_cast<Count>(rng.next_u64() % 500);
        predator[k] = static_cast<Count>(rng.next_u64() % 500);
    }
    Trajectory t;
    t.times = times;
    t.volume_names = {"p0", "p1"};
    t.species_names = {"A", "X", "Y"};
    t.counts.resize(2);
    for (std::size_t k = 0; k < 100; ++k) {
        t.counts[0].push_back({200, prey[k], predator[k]});
        t.counts[1].push_back({200, prey[k], predator[k]});
    }
    const auto report = symmetry_report(t, {{0, 1}});
    REQUIRE(report.size() == 1);
    CHECK(report[0].prey_stat == 0.0);
    CHECK(report[0].predator_stat == 0.0);
}

TEST_CASE("symmetry statistic grows with a mean offset") {
    const auto times = grid_times(100, 0.1);
    Trajectory t;
    t.times = times;
    t.volume_names = {"p0", "p1"};
    t.species_names = {"A", "X", "Y"};
    t.counts.resize(2);
    RandomStream rng(31);
    for (std::size_t k = 0; k < 100; ++k) {
        const Count noise = static_cast<Count>(rng.next_u64() % 20);
        t.counts[0].push_back({200, 100 + noise, 50});
        t.counts[1].push_back({200, 500 + noise, 50});
    }
    const auto report = symmetry_report(t, {{0, 1}});
    CHECK(report[0].prey_stat > 10.0);
    CHECK(report[0].predator_stat == 0.0);
}

TEST_CASE("phase-space export pairs prey with predators") {
    const auto times = grid_times(10, 1.0);
    SUBCASE("constant series collapse to one repeated point") {
        const std::vector<Count> prey(10, 7), predator(10, 3);
        const auto t = make_trajectory(times, prey, predator);
        const auto points = export_phase_space(t, 0);
        REQUIRE(points.size() == 10);
        for (const auto& [x, y] : points) {
            CHECK(x == 7.0);
            CHECK(y == 3.0);
        }
    }
    SUBCASE("empty patches sit on the prey axis") {
        std::vector<Count> prey(10), predator(10, 0);
        for (std::size_t k = 0; k < 10; ++k) prey[k] = static_cast<Count>(10 * k);
        const auto t = make_trajectory(times, prey, predator);
        for (const auto& [x, y] : export_phase_space(t, 0)) CHECK(y == 0.0);
    }
}

TEST_CASE("series statistics honor the window") {
    const std::vector<double> times = {0, 1, 2, 3};
    const std::vector<double> values = {100, 100, 10, 20};
    const auto stats = series_stats(times, values, 2.0);
    CHECK(stats.samples == 2);
    CHECK(stats.mean == doctest::Approx(15.0));
    CHECK(stats.min == 10.0);
    CHECK(stats.max == 20.0);
}

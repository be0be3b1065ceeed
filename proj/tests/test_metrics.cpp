#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dsync/clocksim.hpp"
#include "dsync/metrics.hpp"
#include "oracles.hpp"

using namespace dsync;

TEST_CASE("tdev matches direct summation") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> w(0.0, 25e-12);
        std::vector<double> x(1000);
        double walk = 0.0;
        for (auto& v : x) {
            walk += w(gen) * 0.3;
            v = walk + w(gen);
        }
        for (std::size_t n : {1u, 2u, 5u, 10u, 50u, 333u}) {
            const double ref = oracle::tdev(x, n);
            CHECK(std::abs(tdev(x, n) - ref) <= 1e-12 * ref);
        }
    }
}

TEST_CASE("tdev of constant and linear sequences") {
    const std::vector<double> flat(500, 7.25e-9);
    std::vector<double> ramp(500), ramp2(500);
    for (std::size_t i = 0; i < ramp.size(); ++i) {
        ramp[i] = 3.0 * static_cast<double>(i);
        ramp2[i] = -0.25 * static_cast<double>(i);
    }
    for (std::size_t n : {1u, 2u, 5u, 10u, 50u}) {
        CHECK(tdev(flat, n) == 0.0);
        CHECK(tdev(ramp, n) == 0.0);
        CHECK(tdev(ramp2, n) == 0.0);
    }
}

TEST_CASE("tdev argument checks") {
    const std::vector<double> x(10, 0.0);
    CHECK_THROWS_AS(tdev(x, 0), std::invalid_argument);
    CHECK_THROWS_AS(tdev(x, 4), std::invalid_argument);
    CHECK_NOTHROW(tdev(x, 3));
}

TEST_CASE("tdev curve on the 1-2-5 ladder") {
    CHECK(default_ladder(2000) == std::vector<std::size_t>{1, 2, 5, 10, 20, 50, 100, 200, 500});
    CHECK(default_ladder(31) == std::vector<std::size_t>{1, 2, 5, 10});
    CHECK(default_ladder(3).empty());

    std::mt19937_64 gen(6);
    std::normal_distribution<double> w(0.0, 1.0);
    std::vector<double> x(400);
    for (auto& v : x) v = w(gen);
    const auto curve = tdev_curve(x, 0.5);
    CHECK(curve.tau0 == 0.5);
    REQUIRE(curve.points.size() == 7);
    CHECK(curve.points[3].tau == 5.0);
    CHECK(curve.at_factor(10) == tdev(x, 10));
    CHECK(curve.at_factor(3) == -1.0);
}

TEST_CASE("white phase noise falls as one over root n") {
    std::mt19937_64 gen(12);
    std::normal_distribution<double> w(0.0, 1.0);
    std::vector<double> x(200000);
    for (auto& v : x) v = w(gen);
    // second differences of white noise: var(sum) = 6n, divided by 6n^2
    for (std::size_t n : {1u, 4u, 16u}) {
        const double expected = 1.0 / std::sqrt(static_cast<double>(n));
        CHECK(tdev(x, n) == doctest::Approx(expected).epsilon(0.03));
    }
}

TEST_CASE("precision and recall per path") {
    SUBCASE("attacked path plus spill-over flags") {
        // two paths, 200 epochs; path 0 attacked every 5th epoch, flagged every epoch
        std::vector<AttackEvent> attacks;
        for (std::int64_t e = 0; e < 200; e += 5) attacks.push_back({0, e, 1e-8, 1});
        const EventSchedule sched(attacks, {});
        FlagMatrix fm;
        for (std::int64_t e = 0; e < 200; ++e) {
            fm.epochs.push_back(e);
            fm.flags.push_back({true, e % 5 == 0 && e < 100});
        }
        const auto s = precision_recall(fm, sched, 2);
        CHECK(s[0].counts.tp == 40);
        CHECK(s[0].counts.fp == 160);
        CHECK(s[0].counts.fn == 0);
        CHECK(s[0].precision == doctest::Approx(0.2));
        CHECK(s[0].recall == 1.0);
        CHECK(s[1].counts.fp == 20);
        CHECK(s[1].precision == 0.0);
        CHECK(s[1].recall == 1.0);
    }
    SUBCASE("missed attacks") {
        const EventSchedule sched({{1, 3, 1e-9, 2}}, {});
        FlagMatrix fm{{2, 3, 4, 5}, {{false, false}, {false, true}, {false, false}, {false, false}}};
        const auto s = precision_recall(fm, sched, 2);
        CHECK(s[1].counts.tp == 1);
        CHECK(s[1].counts.fn == 1);
        CHECK(s[1].recall == 0.5);
        CHECK(s[1].precision == 1.0);
    }
    SUBCASE("no attacks and no flags") {
        FlagMatrix fm{{0, 1}, {{false, false, false}, {false, false, false}}};
        for (const auto& s : precision_recall(fm, EventSchedule{}, 3)) {
            CHECK(s.precision == 1.0);
            CHECK(s.recall == 1.0);
        }
    }
    SUBCASE("shape errors") {
        FlagMatrix fm{{0}, {{false}}};
        CHECK_THROWS_AS(precision_recall(fm, EventSchedule{}, 2), std::invalid_argument);
        FlagMatrix ragged{{0, 1}, {{false}}};
        CHECK_THROWS_AS(precision_recall(ragged, EventSchedule{}, 1), std::invalid_argument);
    }
}

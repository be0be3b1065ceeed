#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dsync/clocksim.hpp"
#include "dsync/evidence.hpp"
#include "oracles.hpp"

using namespace dsync;

TEST_CASE("combine on the two-element frame") {
    const auto m = combine({0.8, 0.2}, {0.6, 0.4});
    CHECK(m.m_attack == doctest::Approx(6.0 / 7.0).epsilon(1e-14));
    CHECK(m.m_normal == doctest::Approx(1.0 / 7.0).epsilon(1e-14));

    const std::vector<MassPair> list{MassPair::from_attack(0.9), MassPair::from_attack(0.9),
                                     MassPair::from_attack(0.1)};
    CHECK(combine_all(list).m_attack == doctest::Approx(0.9).epsilon(1e-14));

    CHECK_THROWS_AS(combine({1.0, 0.0}, {0.0, 1.0}), TotalConflictError);
    CHECK_THROWS_AS(combine_all(std::span<const MassPair>{}), std::invalid_argument);
    CHECK(combine({1.0, 0.0}, {0.3, 0.7}) == MassPair{1.0, 0.0});
}

TEST_CASE("combine algebra on random masses") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
        const auto a = MassPair::from_attack(u(gen));
        const auto b = MassPair::from_attack(u(gen));
        const auto c = MassPair::from_attack(u(gen));

        const auto ab = combine(a, b);
        const auto ba = combine(b, a);
        CHECK(std::abs(ab.m_attack - ba.m_attack) <= 1e-12);
        CHECK(ab.valid());

        const auto left = combine(ab, c);
        const auto right = combine(a, combine(b, c));
        CHECK(std::abs(left.m_attack - right.m_attack) <= 1e-12);
        CHECK(std::abs(left.m_normal - right.m_normal) <= 1e-12);

        CHECK(combine(a, MassPair::vacuous()) == a);
        CHECK(combine(MassPair::vacuous(), a) == a);
    }
}

TEST_CASE("sigmoid mass and clamps") {
    const auto c = calibrate(38.08 * kPicosecond, {1e-3, 1e-3, 0.9, 0.1});
    const double B = c.midpoint;

    CHECK(bpa_from_residual(0.0, c, Variant::DS0).m_attack == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(bpa_from_residual(0.0, c, Variant::DS2).m_attack == 0.1);
    CHECK(bpa_from_residual(10 * B, c, Variant::DS1).m_attack == 0.9);
    CHECK(bpa_from_residual(B, c, Variant::DS0).m_attack == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(bpa_from_residual(2 * B, c, Variant::DS0).m_attack == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(bpa_from_residual(0.0, c, Variant::DS1).m_attack == doctest::Approx(0.01).epsilon(1e-12));

    CHECK_THROWS_AS(bpa_from_residual(-1e-12, c, Variant::DS2), std::invalid_argument);
    CHECK_THROWS_AS(bpa_from_residual(NAN, c, Variant::DS2), std::invalid_argument);
}

TEST_CASE("sigmoid mass properties on random residuals") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> sig(1.0, 200.0);
    std::uniform_real_distribution<double> frac(0.0, 5.0);
    std::uniform_real_distribution<double> kmin(0.0, 0.49);
    std::uniform_real_distribution<double> kmax(0.51, 1.0);
    for (int k = 0; k < 10000; ++k) {
        auto c = calibrate(sig(gen) * kPicosecond, {1e-3, 1e-3, kmax(gen), kmin(gen)});
        const double x1 = frac(gen) * c.midpoint;
        const double x2 = x1 + frac(gen) * c.midpoint;

        for (auto v : {Variant::DS0, Variant::DS1, Variant::DS2}) {
            const auto m1 = bpa_from_residual(x1, c, v);
            const auto m2 = bpa_from_residual(x2, c, v);
            CHECK(m1.m_attack <= m2.m_attack);
            CHECK(m1.valid());
        }
        const double d2 = bpa_from_residual(x1, c, Variant::DS2).m_attack;
        CHECK(d2 >= c.k_min);
        CHECK(d2 <= c.k_max);

        c.k_min = 0.0;
        c.k_max = 1.0;
        const auto ds0 = bpa_from_residual(x1, c, Variant::DS0);
        CHECK(bpa_from_residual(x1, c, Variant::DS2) == ds0);
        CHECK(bpa_from_residual(x1, c, Variant::DS1) == ds0);
    }
}

TEST_CASE("calibration against an independent inverse normal") {
    const double sigma = 38.08 * kPicosecond;
    const auto c = calibrate(sigma, {1e-3, 1e-3});
    const double z = oracle::upper_quantile(1e-3);
    CHECK(z == doctest::Approx(3.0902).epsilon(1e-4));
    CHECK(std::abs(c.threshold - z * sigma) < 1e-4 * kPicosecond);
    CHECK(c.threshold / kPicosecond == doctest::Approx(117.676).epsilon(1e-5));
    CHECK(c.min_detectable / kPicosecond == doctest::Approx(235.352).epsilon(1e-5));
    CHECK(c.midpoint == c.min_detectable / 2);
    CHECK(c.steepness == doctest::Approx(std::log(99.0) / c.midpoint).epsilon(1e-14));

    // the defining equations hold after solving
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> lp(-12.0, std::log(0.49));
    for (int k = 0; k < 200; ++k) {
        const double pf = std::exp(lp(gen));
        const double pm = std::exp(lp(gen));
        const auto cc = calibrate(sigma, {pf, pm});
        CHECK(std::abs(oracle::phi(cc.threshold / sigma) - (1 - pf)) < 1e-9);
        CHECK(std::abs(oracle::phi((cc.threshold - cc.min_detectable) / sigma) - pm) < 1e-9);
        CHECK(cc.midpoint == cc.min_detectable / 2);
    }
}

TEST_CASE("calibration options and errors") {
    const double sigma = 10 * kPicosecond;
    CHECK(std::abs(false_alarm_threshold(sigma, 0.5)) < 1e-15 * sigma);

    const auto one = calibrate(sigma, {1e-3, 1e-3});
    CalibrationOptions two;
    two.p_false_alarm = 2e-3;
    two.p_miss = 1e-3;
    two.two_sided = true;
    CHECK(calibrate(sigma, two).threshold == doctest::Approx(one.threshold).epsilon(1e-12));

    CalibrationOptions steep;
    steep.steepness_log_odds = 2.0;
    const auto s = calibrate(sigma, steep);
    CHECK(s.steepness * s.midpoint == doctest::Approx(2.0).epsilon(1e-14));

    CHECK_THROWS_AS(calibrate(sigma, {0.5, 1e-3}), std::invalid_argument);
    CHECK_THROWS_AS(calibrate(sigma, {0.0, 1e-3}), std::invalid_argument);
    CHECK_THROWS_AS(calibrate(sigma, {1e-3, 0.7}), std::invalid_argument);
    CHECK_THROWS_AS(calibrate(0.0, {1e-3, 1e-3}), std::invalid_argument);
    CHECK_THROWS_AS(calibrate(sigma, {1e-3, 1e-3, 0.4, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(calibrate(sigma, {1e-3, 1e-3, 0.9, 0.6}), std::invalid_argument);
}

TEST_CASE("variant names") {
    for (auto v : {Variant::DS0, Variant::DS1, Variant::DS2}) CHECK(parse_variant(to_string(v)) == v);
    CHECK_THROWS_AS(parse_variant("DS3"), std::invalid_argument);
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dsync/clocksim.hpp"
#include "dsync/fusion.hpp"
#include "oracles.hpp"

using namespace dsync;

namespace {

constexpr double ps = kPicosecond;

CalibrationSet nominal_calibs(std::size_t n) {
    return CalibrationSet::from_noise(NoiseConfig::nominal(n), CalibrationOptions{});
}

std::vector<bool> flags_of(const std::vector<Verdict>& v) {
    std::vector<bool> out;
    for (const auto& x : v) out.push_back(x.flagged);
    return out;
}

}  // namespace

TEST_CASE("residual sets") {
    const std::vector<double> zeros{0, 0, 0};
    CHECK(residuals_for_path(0, zeros, 0.0, 1.0) == std::vector<double>{0, 0, 0});

    const std::vector<double> one_attacked{10e-9, 0, 0};
    CHECK(residuals_for_path(0, one_attacked, 0.0, 1.0) == std::vector<double>{10e-9, 10e-9, 10e-9});
    CHECK(residuals_for_path(1, one_attacked, 0.0, 1.0) == std::vector<double>{0, 10e-9, 0});

    const std::vector<double> two{100 * ps, 90 * ps};
    const auto r = residuals_for_path(0, two, 1e-10, 1.0);
    CHECK(r[0] == doctest::Approx(0.0));
    CHECK(r[1] == doctest::Approx(10 * ps).epsilon(1e-9));

    CHECK_THROWS_AS(residuals_for_path(3, zeros, 0.0, 1.0), std::out_of_range);
    CHECK_THROWS_AS(residuals_for_path(0, std::vector<double>{1.0}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("calibration set from nominal noise") {
    const auto cs = nominal_calibs(5);
    REQUIRE(cs.n_paths() == 5);
    // cross: two independent paths of sqrt(10^2 + 25^2) ps each
    CHECK(cs.cross(0, 3).sigma_residual / ps == doctest::Approx(std::sqrt(1450.0)).epsilon(1e-12));
    CHECK(cs.cross(3, 0).sigma_residual == cs.cross(0, 3).sigma_residual);
    // self: own path, one clock step and the previous combined estimate
    CHECK(cs.self(2).sigma_residual / ps == doctest::Approx(std::sqrt(725.0 + 100.0 + 725.0 / 5)).epsilon(1e-12));

    const auto clamped = cs.with_clamps(0.0, 1.0);
    CHECK(clamped.self(0).k_min == 0.0);
    CHECK(clamped.cross(1, 2).k_max == 1.0);
    CHECK(clamped.cross(1, 2).midpoint == cs.cross(1, 2).midpoint);

    auto quiet = NoiseConfig::nominal(3);
    quiet.sigma_theta = 0;
    quiet.sigma_d.assign(3, 0.0);
    quiet.sigma_m.assign(3, 0.0);
    CHECK(CalibrationSet::from_noise(quiet, {}).self(0).sigma_residual == 1e-15);
}

TEST_CASE("one attacked path among nominal ones") {
    const auto cs = nominal_calibs(5);
    const std::vector<double> offsets{10e-9 + 4 * ps, 12 * ps, -8 * ps, 20 * ps, -15 * ps};

    const auto ds2 = classify_paths(offsets, cs, 0.0, 1.0, Variant::DS2, 7);
    CHECK(flags_of(ds2) == std::vector<bool>{true, false, false, false, false});
    CHECK(ds2[3].epoch == 7);
    CHECK(ds2[3].path_id == 3);

    const auto ds1 = classify_paths(offsets, cs, 0.0, 1.0, Variant::DS1);
    CHECK(flags_of(ds1) == std::vector<bool>{true, false, false, false, false});

    // unclamped cross evidence from the attacked path overwhelms every other path
    const auto ds0 = classify_paths(offsets, cs, 0.0, 1.0, Variant::DS0);
    CHECK(flags_of(ds0) == std::vector<bool>(5, true));
}

TEST_CASE("all-zero offsets flag nothing") {
    const auto cs = nominal_calibs(5);
    const std::vector<double> zeros(5, 0.0);
    for (auto v : {Variant::DS0, Variant::DS1, Variant::DS2})
        for (const auto& verdict : classify_paths(zeros, cs, 0.0, 1.0, v)) {
            CHECK_FALSE(verdict.flagged);
            CHECK(verdict.fused.m_attack < 0.5);
        }
}

TEST_CASE("common-mode offsets leave virtual residuals unchanged") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> noise(0.0, 30 * ps);
    std::uniform_real_distribution<double> shift(-5e-9, 5e-9);
    for (int k = 0; k < 1000; ++k) {
        std::vector<double> a(4);
        for (auto& x : a) x = noise(gen);
        const double c = shift(gen);
        auto b = a;
        for (auto& x : b) x += c;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto ra = residuals_for_path(i, a, 0.0, 1.0);
            const auto rb = residuals_for_path(i, b, 0.0, 1.0);
            for (std::size_t j = 1; j < 4; ++j) CHECK(std::abs(ra[j] - rb[j]) < 1e-20 + 1e-12 * std::abs(c));
        }
    }

    // a clock jump moves every offset together; DS2 keeps trusting all paths
    for (std::size_t n : {3u, 5u}) {
        const auto cs = nominal_calibs(n);
        for (double c : {1e-9, -1e-9, 1e-6}) {
            const std::vector<double> offsets(n, c);
            CHECK(flags_of(classify_paths(offsets, cs, 0.0, 1.0, Variant::DS2)) == std::vector<bool>(n, false));
        }
    }
}

TEST_CASE("DS2 with open clamps is DS0") {
    const auto cs = nominal_calibs(5);
    const auto open = cs.with_clamps(0.0, 1.0);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> noise(0.0, 60 * ps);
    std::bernoulli_distribution attacked(0.2);
    for (int k = 0; k < 2000; ++k) {
        std::vector<double> offsets(5);
        for (auto& x : offsets) x = noise(gen) + (attacked(gen) ? 300 * ps : 0.0);
        const auto a = classify_paths(offsets, open, 0.0, 1.0, Variant::DS2);
        const auto b = classify_paths(offsets, open, 0.0, 1.0, Variant::DS0);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(a[i].fused == b[i].fused);
            CHECK(a[i].flagged == b[i].flagged);
        }
    }
}

TEST_CASE("update from trusted paths") {
    auto verdicts = [](std::vector<bool> f) {
        std::vector<Verdict> v;
        for (std::size_t i = 0; i < f.size(); ++i) v.push_back({i, 0, {}, f[i]});
        return v;
    };
    const std::vector<double> a{10 * ps, 20 * ps, 30 * ps};
    CHECK(compute_update(a, verdicts({false, false, false}), 0.0, 1.0) == doctest::Approx(-20 * ps));

    const std::vector<double> b{10 * ps, 20 * ps, 10000 * ps};
    CHECK(compute_update(b, verdicts({false, false, true}), 0.0, 1.0) == doctest::Approx(-15 * ps));

    CHECK(compute_update(b, verdicts({true, true, true}), 1e-12, 1.0) == doctest::Approx(-1 * ps));
    CHECK_THROWS_AS(compute_update(b, verdicts({true, true}), 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("frequency from a window of phases") {
    CHECK(estimate_frequency(std::vector<double>(30, 0.0), 1.0).gamma_hat == 0.0);
    CHECK(estimate_frequency(std::vector<double>{5.0}, 1.0).gamma_hat == 0.0);

    std::vector<double> ramp(30);
    for (std::size_t k = 0; k < ramp.size(); ++k) ramp[k] = 7 * ps + 2e-12 * 0.5 * static_cast<double>(k);
    CHECK(estimate_frequency(ramp, 0.5).gamma_hat == doctest::Approx(2e-12).epsilon(1e-9));

    // matches the normal-equation slope and stays within 3 standard errors
    const double g = 1e-12, sigma = 25 * ps, tau = 1.0;
    const double bound = 3 * (sigma / tau) * std::sqrt(12.0 / (30.0 * 30 * 30 - 30));
    std::mt19937_64 gen(8);
    std::normal_distribution<double> noise(0.0, sigma);
    int outside = 0;
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<double> y(30);
        for (std::size_t k = 0; k < 30; ++k) y[k] = g * tau * static_cast<double>(k) + noise(gen);
        const double est = estimate_frequency(y, tau).gamma_hat;
        CHECK(est == doctest::Approx(oracle::ols_slope(y) / tau).epsilon(1e-9));
        if (std::abs(est - g) > bound) ++outside;
    }
    // about 0.27% of trials fall outside 3 sigma
    CHECK(outside <= 6);

    std::vector<double> fixed(30);
    std::mt19937_64 seeded(1);
    for (std::size_t k = 0; k < 30; ++k) fixed[k] = g * tau * static_cast<double>(k) + noise(seeded);
    CHECK(std::abs(estimate_frequency(fixed, tau).gamma_hat - g) <= bound);
}

TEST_CASE("frequency tracker follows a corrected clock") {
    // noiseless clock with constant frequency, corrected every epoch
    const double g = 3e-12, tau = 1.0;
    FrequencyTracker tr(30, tau);
    double theta = 50 * ps;
    for (int n = 0; n < 100; ++n) {
        const double u = -theta;
        tr.push(theta, true, u);
        theta = theta + u + g * tau;
        if (n >= 1) CHECK(tr.estimate().gamma_hat == doctest::Approx(g).epsilon(1e-6));
    }
    CHECK(tr.estimate().window == 30);

    // untrusted epochs extrapolate and keep the slope
    for (int n = 0; n < 10; ++n) tr.push(0.0, false, -g * tau);
    CHECK(tr.estimate().gamma_hat == doctest::Approx(g).epsilon(1e-6));

    CHECK_THROWS_AS(FrequencyTracker(1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyTracker(30, 0.0), std::invalid_argument);
}

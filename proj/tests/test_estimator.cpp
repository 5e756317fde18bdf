#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "erltv/deviation_lab.hpp"
#include "erltv/estimator.hpp"
#include "erltv/rate_functions.hpp"
#include "erltv/stats.hpp"

using namespace erltv;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("regular estimator examples") {
    const std::vector<double> zeros(100, 0.0);
    for (double u : {0.0, 0.3, 4.0}) CHECK(erltv_regular(zeros, u) == 1.0);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 0.3);
    std::vector<double> dx(64);
    for (auto& d : dx) d = z(rng);
    CHECK(erltv_regular(dx, 0.0) == 1.0);

    const std::vector<double> two = {0.0, kPi / 2.0};
    CHECK(std::abs(erltv_regular(two, 1.0)) < 1e-15);
    CHECK_THROWS_AS(erltv_regular(two, -1.0), DomainError);
}

TEST_CASE("irregular estimator examples") {
    const auto half = SamplingScheme::irregular({0.0, 0.5, 1.0}, 2);
    const std::vector<double> zeros = {0.0, 0.0};
    CHECK(erltv_irregular(half, zeros, 1.0) == 1.0);
    const std::vector<double> dx = {kPi / std::sqrt(4.0), 0.0};
    CHECK(std::abs(erltv_irregular(half, dx, 1.0)) < 1e-15);

    const auto uneven = SamplingScheme::irregular({0.0, 0.2, 0.5, 1.0}, 3);
    const std::vector<double> d3 = {0.1, -0.2, 0.05};
    const double expected = std::cos(std::sqrt(2.0 / 0.2) * 0.1) * 0.2 + std::cos(std::sqrt(2.0 / 0.3) * -0.2) * 0.3 +
                            std::cos(std::sqrt(2.0 / 0.5) * 0.05) * 0.5;
    CHECK(erltv_irregular(uneven, d3, 1.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(erltv::erltv(uneven, d3, 1.0) == erltv_irregular(uneven, d3, 1.0));
    CHECK(erltv_irregular(uneven, std::vector<double>(3, 0.0), 2.0) == doctest::Approx(1.0).epsilon(1e-15));

    PathIncrements p{uneven, d3, 0, std::nullopt};
    CHECK_THROWS_AS(erltv_regular(p, 1.0), WrongEstimatorError);
    CHECK_THROWS_AS(erltv_irregular(uneven, std::vector<double>(2, 0.0), 1.0), ParameterError);
}

TEST_CASE("irregular estimator reduces to the regular one on regular grids") {
    const std::size_t n = 1000;
    std::vector<double> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i) times[i] = static_cast<double>(i) / static_cast<double>(n);
    const auto as_irregular = SamplingScheme::irregular(times, n);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 1.0 / std::sqrt(1000.0));
    std::vector<double> dx(n);
    for (auto& d : dx) d = z(rng);
    for (double u : {0.0, 0.5, 1.0, 4.0}) {
        CHECK(erltv_irregular(as_irregular, dx, u) == erltv_regular(dx, u));
        CHECK(erltv_irregular(SamplingScheme::regular(n), dx, u) == erltv_regular(dx, u));
    }
}

TEST_CASE("estimates are bounded by one") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> wild(-50.0, 50.0);
    const auto scheme = SamplingScheme::quantile(300, [](double v) { return v * v; });
    std::vector<double> dx(300);
    for (int rep = 0; rep < 50; ++rep) {
        for (auto& d : dx) d = wild(rng);
        for (double u : default_u_grid()) {
            CHECK(std::abs(erltv_regular(dx, u)) <= 1.0);
            CHECK(std::abs(erltv_irregular(scheme, dx, u)) <= 1.0 + 1e-15);
        }
    }
}

TEST_CASE("curve examples") {
    const auto p = simulate_increments(VolatilityModel::constant(1.0), DriftSpec::zero(), JumpSpec::none(),
                                       SamplingScheme::regular(50), 1, std::nullopt);
    const std::vector<double> zero = {0.0};
    CHECK(erltv_curve(p, zero).values == std::vector<double>{1.0});
    const std::vector<double> dup = {0.7, 0.7};
    const auto c = erltv_curve(p, dup);
    CHECK(c.values[0] == c.values[1]);
    CHECK_THROWS_AS(erltv_curve(p, std::vector<double>{}), ParameterError);
    CHECK_THROWS_AS(erltv_curve(p, std::vector<double>{1.0, 0.5}), ParameterError);

    const auto grid = default_u_grid();
    REQUIRE(grid.size() == 41);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 4.0);
    CHECK(grid[10] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("one path at n = 10^4 lies inside the CLT band") {
    const std::size_t n = 10000;
    const auto flat = VolatilityPath::constant(1.0);
    const auto p = simulate_increments(VolatilityModel::constant(1.0), DriftSpec::zero(), JumpSpec::none(),
                                       SamplingScheme::regular(n), 2024, std::nullopt);
    const std::vector<double> us = {0.5, 1.0, 2.0};
    const auto c = erltv_curve(p, us);
    for (std::size_t j = 0; j < us.size(); ++j) {
        const double band = 3.0 * std::sqrt(clt_covariance(us[j], us[j], flat) / static_cast<double>(n));
        CHECK(std::abs(c.values[j] - std::exp(-us[j])) < band);
    }
}

TEST_CASE("RMS error decays like n^-1/2 on regular grids") {
    ModelSetup model;
    const std::vector<std::size_t> ns = {100, 1000, 10000};
    std::vector<double> xs, rms;
    const double u[1] = {1.0};
    for (std::size_t n : ns) {
        const auto v = simulate_estimates(model, SamplingScheme::regular(n), u, {1000, 99, 1});
        double ss = 0.0;
        for (double x : v) ss += (x - std::exp(-1.0)) * (x - std::exp(-1.0));
        xs.push_back(static_cast<double>(n));
        rms.push_back(std::sqrt(ss / static_cast<double>(v.size())));
    }
    CHECK(std::abs(stats::loglog_slope(xs, rms) + 0.5) < 0.05);
}

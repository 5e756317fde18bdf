#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "erltv/market_model.hpp"

using namespace erltv;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

// T_n(s) by summing each gap's overlap with [0, s], weighted 1 / (n gap).
double direct_time_change(std::span<const double> times, std::size_t n, double s) {
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double overlap = std::clamp(s - times[i - 1], 0.0, times[i] - times[i - 1]);
        acc += overlap / (times[i] - times[i - 1]) / static_cast<double>(n);
    }
    return acc;
}

}  // namespace

TEST_CASE("eval_sigma examples") {
    CHECK(eval_sigma(VolatilityModel::constant(1.0), 0.37) == 1.0);
    CHECK(eval_sigma(VolatilityModel::sinusoid(1.0, 0.5, kTwoPi), 0.25) == doctest::Approx(1.5).epsilon(1e-15));
    const auto cir = VolatilityModel::cir_like(2.0, 1.0, 0.3, 0.2);
    CHECK(eval_sigma(cir, 0.0, 7) == 1.0);
    CHECK_THROWS_AS(eval_sigma(VolatilityModel::constant(1.0), 1.5), DomainError);
    CHECK_THROWS_AS(eval_sigma(VolatilityModel::constant(1.0), -0.1), DomainError);
    CHECK_THROWS_AS(eval_sigma(cir, 0.5), ParameterError);
}

TEST_CASE("volatility models stay above sigma_min and carry continuity classes") {
    const auto wave = VolatilityModel::sinusoid(1.0, 0.5, kTwoPi);
    const auto cir = VolatilityModel::cir_like(2.0, 1.0, 1.5, 0.3);
    const auto grid = VolatilityModel::piecewise_grid({1.0, 0.6, 1.4});
    const auto wave_path = wave.realize();
    const auto cir_path = cir.realize(11);
    const auto grid_path = grid.realize();
    for (int i = 0; i <= 1000; ++i) {
        const double s = i / 1000.0;
        CHECK(wave_path(s) >= wave.sigma_min());
        CHECK(cir_path(s) >= 0.3);
        CHECK(grid_path(s) >= 0.6 - 1e-15);
    }
    CHECK(grid_path(0.25) == doctest::Approx(0.8));
    CHECK(wave.continuity_class() == ContinuityClass::Lipschitz);
    CHECK(VolatilityModel::constant(2.0).continuity_class() == ContinuityClass::Lipschitz);
    CHECK(cir.continuity_class() == ContinuityClass::HalfHolder);
    CHECK_THROWS_AS(VolatilityModel::sinusoid(1.0, 1.0, kTwoPi), ParameterError);
    CHECK_THROWS_AS(VolatilityModel::sinusoid(1.0, 0.5, kTwoPi, 0.6), ParameterError);
    CHECK_THROWS_AS(VolatilityModel::constant(0.0), ParameterError);
}

TEST_CASE("stochastic volatility paths are fixed by their seed") {
    const auto cir = VolatilityModel::cir_like(2.0, 1.0, 0.8, 0.2);
    const auto a = cir.realize(5), b = cir.realize(5), c = cir.realize(6);
    bool differs = false;
    for (int i = 0; i <= 100; ++i) {
        const double s = i / 100.0;
        CHECK(a(s) == b(s));
        CHECK(eval_sigma(cir, s, 5) == a(s));
        differs = differs || a(s) != c(s);
    }
    CHECK(differs);
}

TEST_CASE("laplace_curve examples and invariants") {
    const auto flat = VolatilityPath::constant(1.0);
    const std::vector<double> us = {0.0, 1.0};
    const auto f = laplace_curve(flat, us);
    CHECK(f[0] == 1.0);
    CHECK(f[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    for (int steps : {1, 3, 512})
        CHECK(std::abs(laplace_value(VolatilityPath::constant(1.7), 0.8, steps) - std::exp(-0.8 * 1.7 * 1.7)) < 1e-12);

    // frozen from a 10^6-step midpoint oracle
    const auto wave = VolatilityModel::sinusoid(1.0, 0.5, kTwoPi).realize();
    double oracle = 0.0;
    const int m = 1000000;
    for (int k = 0; k < m; ++k) {
        const double sig = wave((k + 0.5) / m);
        oracle += std::exp(-sig * sig);
    }
    oracle /= m;
    CHECK(std::abs(oracle - 0.407122427737) < 1e-11);
    CHECK(std::abs(laplace_value(wave, 1.0) - 0.407122427737) < 1e-11);

    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.1 * i);
    const auto g = laplace_curve(wave, grid);
    CHECK(g[0] == 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);

    CHECK_THROWS_AS(laplace_value(flat, -1.0), DomainError);
    CHECK_THROWS_AS(laplace_value(flat, 1.0, 0), ParameterError);
}

TEST_CASE("drift and jump specifications") {
    const auto d = DriftSpec::on_grid({0.0, 2.0, -1.0});
    CHECK(d(0.25) == doctest::Approx(1.0));
    CHECK(d.bound() == 2.0);
    CHECK(DriftSpec::constant(-0.3).bound() == doctest::Approx(0.3));
    CHECK(DriftSpec::zero().is_zero());

    CHECK(JumpSpec::none().is_none());
    CHECK(JumpSpec::compound_poisson(5.0, NormalJumpSize{0.0, 0.1}).intensity() == 5.0);
    CHECK(JumpSpec::compound_poisson(0.0, NormalJumpSize{}).is_none());
    const auto ts = JumpSpec::truncated_stable(0.5, 0.2, 0.01);
    CHECK(ts.beta() == 0.5);
    CHECK(ts.intensity() == doctest::Approx(2.0 * 0.2 * (std::pow(0.01, -0.5) - 1.0) / 0.5));
    CHECK(JumpSpec::truncated_stable(0.5, 0.0, 0.01).is_none());
    CHECK_THROWS_AS(JumpSpec::truncated_stable(1.0, 0.2, 0.01), ParameterError);
    CHECK_THROWS_AS(JumpSpec::truncated_stable(1.5, 0.2, 0.01), ParameterError);
    CHECK_THROWS_AS(JumpSpec::compound_poisson(-1.0, NormalJumpSize{}), ParameterError);
}

TEST_CASE("build_scheme examples") {
    const auto r = build_scheme(4);
    const std::vector<double> expected = {0.0, 0.25, 0.5, 0.75, 1.0};
    CHECK(std::equal(r.scheme.times().begin(), r.scheme.times().end(), expected.begin()));
    for (double g : r.scheme.gaps()) CHECK(g == 0.25);
    CHECK(r.diagnostics.sqrt_n_max_gap == doctest::Approx(0.5));
    CHECK(r.diagnostics.n_sum_squared_gaps == doctest::Approx(1.0));
    CHECK(r.scheme.is_regular());

    const auto irr = build_scheme({0.0, 0.5, 0.6}, 3);
    CHECK(irr.scheme.size() == 2);
    CHECK(!irr.scheme.is_regular());
    CHECK(irr.diagnostics.sqrt_n_max_gap == doctest::Approx(std::sqrt(3.0) * 0.5));

    CHECK_THROWS_WITH_AS(build_scheme({0.0, 0.6, 0.5}, 3), doctest::Contains("monotonic"), SchemeError);
    CHECK_THROWS_AS(build_scheme({0.1, 0.5, 0.6}, 3), SchemeError);
    CHECK_THROWS_AS(build_scheme({0.0, 0.5, 1.2}, 3), SchemeError);
    CHECK_THROWS_AS(build_scheme({0.0, 0.2, 0.4, 0.6}, 2), SchemeError);
    CHECK(build_scheme({0.0, 0.5, 1.0}, 2).scheme.is_regular());
}

TEST_CASE("times file loading") {
    const auto path = std::filesystem::temp_directory_path() / "erltv_times.txt";
    {
        std::ofstream f(path);
        f << "# sample times\n0\n0.25\n\n0.7\n1\n";
    }
    const auto times = read_times_file(path.string());
    CHECK(times == std::vector<double>{0.0, 0.25, 0.7, 1.0});
}

TEST_CASE("time_change examples") {
    const auto reg = SamplingScheme::regular(7);
    for (double s : {0.0, 0.1, 0.33, 0.5, 0.99, 1.0}) {
        const auto tc = time_change(reg, s);
        CHECK(std::abs(tc.value - s) < 1e-15);
        CHECK(std::abs(tc.derivative - 1.0) < 1e-12);
    }
    const auto half = SamplingScheme::irregular({0.0, 0.5, 1.0}, 2);
    CHECK(time_change(half, 0.25).value == doctest::Approx(0.25));

    const auto early = SamplingScheme::irregular({0.0, 0.3, 0.6}, 4);
    const auto sat = time_change(early, 0.9);
    CHECK(sat.saturated);
    CHECK(sat.value == doctest::Approx(0.5));
    CHECK_THROWS_AS(time_change(reg, 1.5), DomainError);
}

TEST_CASE("quantile scheme time change against direct summation") {
    auto inv = [](double v) { return std::sqrt(v); };
    const auto q100 = SamplingScheme::quantile(100, inv);
    const double direct = direct_time_change(q100.times(), 100, 0.25);
    CHECK(std::abs(time_change(q100, 0.25).value - direct) < 1e-14);
    CHECK(std::abs(direct - 0.0625) < 1.0 / 100.0);

    const auto big = SamplingScheme::quantile(1000000, inv);
    CHECK(std::abs(direct_time_change(big.times(), 1000000, 0.25) - 0.0625) < 1e-5);
    CHECK(std::abs(time_change(big, 0.25).value - 0.0625) < 1e-5);

    // T_n' approaches 2s away from s = 0
    const auto q5 = SamplingScheme::quantile(100000, inv);
    for (int i = 1; i <= 10; ++i) {
        const double s = 0.1 * i - 0.01;
        CHECK(std::abs(time_change(q5, s).derivative / (2.0 * s) - 1.0) < 0.01);
    }
}

TEST_CASE("diagnostic trends over an n sweep") {
    const std::vector<std::size_t> ns = {100, 1000, 10000, 100000};
    const auto smooth = diagnostic_trend(ns, [](std::size_t n) {
        return SamplingScheme::quantile(n, [](double v) { return (std::sqrt(1.0 + 8.0 * v) - 1.0) / 2.0; });
    });
    CHECK(smooth.max_gap_vanishing);
    CHECK(smooth.sum_squares_bounded);
    const auto reg = diagnostic_trend(ns, [](std::size_t n) { return SamplingScheme::regular(n); });
    CHECK(reg.max_gap_vanishing);
    CHECK(reg.sum_squares_bounded);
    // t_i = sqrt(i / n): first gap is 1 / sqrt(n), so sqrt(n) max gap stays at 1
    const auto root = diagnostic_trend(ns, [](std::size_t n) {
        return SamplingScheme::quantile(n, [](double v) { return std::sqrt(v); });
    });
    CHECK(!root.max_gap_vanishing);
    CHECK(!root.sum_squares_bounded);
}

TEST_CASE("limiting time changes") {
    const auto p2 = TimeChange::power(2.0);
    CHECK(p2.density(0.5) == doctest::Approx(1.0));
    CHECK(p2.cumulative(0.5) == doctest::Approx(0.25));
    CHECK(p2.density_positive_on(64));
    const auto dens = TimeChange::from_density([](double s) { return 0.5 + s; });
    CHECK(dens.cumulative(1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dens.cumulative(0.5) == doctest::Approx(0.375).epsilon(1e-9));
    CHECK(TimeChange::identity().is_identity());
    const auto c = TimeChange::constant(2.0);
    CHECK(c.density(0.3) == 2.0);
}

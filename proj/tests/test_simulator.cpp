#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "erltv/simulator.hpp"
#include "erltv/stats.hpp"

using namespace erltv;

TEST_CASE("n (dX)^2 has mean sigma^2 on a regular grid") {
    const std::size_t n = 1000000;
    const auto p = simulate_increments(VolatilityModel::constant(1.0), DriftSpec::zero(), JumpSpec::none(),
                                       SamplingScheme::regular(n), 42, std::nullopt);
    REQUIRE(p.dx.size() == n);
    double acc = 0.0;
    for (double d : p.dx) acc += static_cast<double>(n) * d * d;
    CHECK(std::abs(acc / static_cast<double>(n) - 1.0) < 0.01);
}

TEST_CASE("sigma = 2 on regular(4) gives N(0, 1) increments") {
    const IncrementSimulator sim(VolatilityPath::constant(2.0), DriftSpec::zero(), JumpSpec::none(),
                                 SamplingScheme::regular(4));
    std::vector<double> dx(4);
    double s1 = 0.0, s2 = 0.0;
    const int paths = 1000000;
    for (int p = 0; p < paths; ++p) {
        sim.fill(static_cast<std::uint64_t>(p), dx);
        s1 += dx[2];
        s2 += dx[2] * dx[2];
    }
    const double mean = s1 / paths;
    CHECK(std::abs(s2 / paths - mean * mean - 1.0) < 0.01);
}

TEST_CASE("standardized increments pass a KS test") {
    const std::size_t n = 100000;
    const auto scheme = SamplingScheme::irregular(
        [] {
            std::vector<double> t = {0.0};
            for (std::size_t i = 1; i <= 100000; ++i) t.push_back(std::pow(i / 100000.0, 0.8));
            return t;
        }(),
        n);
    const double sigma = 1.3;
    const auto p = simulate_increments(VolatilityModel::constant(sigma), DriftSpec::zero(), JumpSpec::none(), scheme,
                                       9, std::nullopt);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = p.dx[i] / (sigma * std::sqrt(scheme.gaps()[i]));
    CHECK(stats::ks_standard_normal(z).p_value > 0.01);
}

TEST_CASE("seed determinism") {
    const auto model = VolatilityModel::cir_like(2.0, 1.0, 0.5, 0.2);
    const auto jumps = JumpSpec::compound_poisson(5.0, LaplaceJumpSize{0.05});
    const auto a = simulate_increments(model, DriftSpec::constant(0.1), jumps, SamplingScheme::regular(500), 3, 8);
    const auto b = simulate_increments(model, DriftSpec::constant(0.1), jumps, SamplingScheme::regular(500), 3, 8);
    const auto c = simulate_increments(model, DriftSpec::constant(0.1), jumps, SamplingScheme::regular(500), 4, 8);
    CHECK(a.dx == b.dx);
    CHECK(a.dx != c.dx);
    CHECK(a.sigma_seed == std::optional<std::uint64_t>(8));
}

TEST_CASE("degenerate jump specifications reproduce the jump-free path") {
    const auto scheme = SamplingScheme::regular(1000);
    auto run = [&](const JumpSpec& j) {
        return simulate_increments(VolatilityModel::constant(1.0), DriftSpec::zero(), j, scheme, 17, std::nullopt).dx;
    };
    const auto base = run(JumpSpec::none());
    CHECK(run(JumpSpec::compound_poisson(0.0, NormalJumpSize{})) == base);
    CHECK(run(JumpSpec::truncated_stable(0.5, 0.0, 0.01)) == base);
}

TEST_CASE("jump additivity under split streams") {
    const auto scheme = SamplingScheme::regular(2000);
    for (const auto& jumps : {JumpSpec::compound_poisson(50.0, NormalJumpSize{0.0, 0.1}),
                              JumpSpec::truncated_stable(0.5, 0.5, 0.01)}) {
        const IncrementSimulator with(VolatilityPath::constant(1.0), DriftSpec::zero(), jumps, scheme);
        const IncrementSimulator without(VolatilityPath::constant(1.0), DriftSpec::zero(), JumpSpec::none(), scheme);
        std::vector<double> full(2000), cont(2000), jmp(2000), plain(2000);
        with.fill(5, full);
        with.fill_continuous(5, cont);
        with.fill_jumps(5, jmp);
        without.fill(5, plain);
        CHECK(cont == plain);
        double total = 0.0;
        for (std::size_t i = 0; i < full.size(); ++i) {
            CHECK(full[i] == cont[i] + jmp[i]);
            total += std::abs(jmp[i]);
        }
        CHECK(total > 0.0);
    }
}

TEST_CASE("jump counts match the intensity") {
    const auto scheme = SamplingScheme::regular(100);
    const IncrementSimulator sim(VolatilityPath::constant(1.0), DriftSpec::zero(),
                                 JumpSpec::compound_poisson(5.0, NormalJumpSize{1.0, 1e-9}), scheme);
    std::vector<double> jmp(100);
    double total = 0.0;
    const int paths = 20000;
    for (int p = 0; p < paths; ++p) {
        sim.fill_jumps(static_cast<std::uint64_t>(p), jmp);
        for (double v : jmp) total += v;
    }
    // mean number of unit jumps per path is 5, standard error 5 / sqrt(paths * 5)
    CHECK(std::abs(total / paths - 5.0) < 4.0 * std::sqrt(5.0 / paths));
}

TEST_CASE("Euler increments reproduce drift and quadratic variation") {
    const auto model = VolatilityModel::sinusoid(1.0, 0.5, 2.0 * std::numbers::pi);
    const auto p = simulate_increments(model, DriftSpec::constant(3.0), JumpSpec::none(), SamplingScheme::regular(20000),
                                       21, std::nullopt, 4);
    double qv = 0.0;
    for (double d : p.dx) qv += d * d;
    CHECK(qv == doctest::Approx(1.125).epsilon(0.05));

    double total = 0.0;
    const IncrementSimulator sim(model.realize(), DriftSpec::constant(3.0), JumpSpec::none(),
                                 SamplingScheme::regular(50), 4);
    std::vector<double> dx(50);
    const int paths = 4000;
    for (int k = 0; k < paths; ++k) {
        sim.fill(static_cast<std::uint64_t>(k), dx);
        for (double d : dx) total += d;
    }
    CHECK(std::abs(total / paths - 3.0) < 4.0 * std::sqrt(1.125 / paths));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(simulate_increments(VolatilityModel::constant(1.0), DriftSpec::zero(), JumpSpec::none(),
                                        SamplingScheme::regular(10), 1, std::nullopt, 0),
                    ParameterError);
    const IncrementSimulator sim(VolatilityPath::constant(1.0), DriftSpec::zero(), JumpSpec::none(),
                                 SamplingScheme::regular(10));
    std::vector<double> wrong(9);
    CHECK_THROWS_AS(sim.fill(1, wrong), ParameterError);
}

TEST_CASE("increments CSV round trip") {
    const auto scheme = SamplingScheme::irregular({0.0, 0.1, 0.35, 0.5, 1.0}, 4);
    const auto p = simulate_increments(VolatilityModel::constant(1.0), DriftSpec::zero(), JumpSpec::none(), scheme, 2,
                                       std::nullopt);
    const auto path = (std::filesystem::temp_directory_path() / "erltv_increments.csv").string();
    const std::vector<std::string> comments = {"config_hash=0 seed=2"};
    write_increments_csv(path, p, comments);
    const auto back = read_increments_csv(path, 4);
    CHECK(back.dx == p.dx);
    CHECK(std::equal(back.scheme.times().begin(), back.scheme.times().end(), scheme.times().begin()));

    const auto reg = simulate_increments(VolatilityModel::constant(1.0), DriftSpec::zero(), JumpSpec::none(),
                                         SamplingScheme::regular(8), 2, std::nullopt);
    write_increments_csv(path, reg);
    CHECK(read_increments_csv(path, 8).scheme.is_regular());
}

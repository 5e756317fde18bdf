#include <doctest.h>

#include <cmath>

#include "erltv/deviation_lab.hpp"

using namespace erltv;

namespace {

TailSettings tail_at(double x) {
    TailSettings s;
    s.u = 1.0;
    s.x = x;
    s.bootstrap_replicates = 199;
    return s;
}

}  // namespace

TEST_CASE("worker count does not change the estimates") {
    ModelSetup model;
    model.jumps = JumpSpec::compound_poisson(5.0, NormalJumpSize{0.0, 0.1});
    const std::vector<double> us = {0.5, 1.0, 2.0};
    const auto scheme = SamplingScheme::regular(200);
    const auto one = simulate_estimates(model, scheme, us, {300, 7, 1});
    const auto three = simulate_estimates(model, scheme, us, {300, 7, 3});
    CHECK(one == three);
    CHECK(one.size() == 900);
    CHECK(simulate_estimates(model, scheme, us, {300, 8, 1}) != one);
}

TEST_CASE("small tail experiment tracks the rate function") {
    const auto r = tail_experiment(ModelSetup{}, SchemeFamily::regular(), tail_at(0.5), {10000, 3, 1});
    REQUIRE(r.cells.size() == 3);
    CHECK(r.slope_model == SlopeModel::BahadurRao);
    CHECK(r.theory.status == RateStatus::Converged);
    for (std::size_t i = 1; i < r.cells.size(); ++i) CHECK(r.cells[i].phat < r.cells[i - 1].phat);
    for (const auto& c : r.cells) CHECK(!c.censored);
    CHECK(r.ci_low <= r.fitted_rate);
    CHECK(r.fitted_rate <= r.ci_high);
    CHECK(std::abs(r.fitted_rate - r.theory.value) < 0.02);

    const auto csv = to_csv(r);
    CHECK(csv.header.front() == "u");
    CHECK(csv.rows.size() == 3);
    CHECK(summary(r).find("fitted") != std::string::npos);
}

TEST_CASE("events beyond the unit interval are certified impossible") {
    const auto r = tail_experiment(ModelSetup{}, SchemeFamily::regular(), tail_at(1.01), {10000, 3, 1});
    CHECK(r.certified_zero);
    CHECK(r.pass);
    CHECK(std::isinf(r.theory.value));
    for (const auto& c : r.cells) CHECK(c.count == 0);
}

TEST_CASE("at the mean the event has probability one half and zero rate") {
    auto s = tail_at(std::exp(-1.0));
    s.n_list = {100, 200, 400};
    const auto r = tail_experiment(ModelSetup{}, SchemeFamily::regular(), s, {10000, 5, 1});
    CHECK(r.slope_model == SlopeModel::Plain);
    for (const auto& c : r.cells) CHECK(std::abs(c.phat - 0.5) < 0.05);
    CHECK(std::abs(r.fitted_rate) < 0.01);
    CHECK(r.pass);
}

TEST_CASE("tail experiment input checks") {
    CHECK_THROWS_AS(tail_experiment(ModelSetup{}, SchemeFamily::regular(), tail_at(0.5), {9999, 1, 1}),
                    ParameterError);
    CHECK_THROWS_AS(tail_experiment(ModelSetup{}, SchemeFamily::regular(), tail_at(0.2), {10000, 1, 1}),
                    ParameterError);
    auto lower = tail_at(0.2);
    lower.side = TailSide::Lower;
    lower.n_list = {25};
    lower.bootstrap_replicates = 0;
    CHECK_NOTHROW(tail_experiment(ModelSetup{}, SchemeFamily::regular(), lower, {10000, 1, 1}));

    auto far = tail_at(0.95);
    far.n_list = {100};
    CHECK_THROWS_AS(tail_experiment(ModelSetup{}, SchemeFamily::regular(), far, {10000, 1, 1}), UnderpoweredError);
}

TEST_CASE("empirical tail probability is monotone in x under common random numbers") {
    std::vector<std::vector<std::size_t>> counts;
    for (double x : {0.42, 0.5, 0.58}) {
        auto s = tail_at(x);
        s.bootstrap_replicates = 0;
        const auto r = tail_experiment(ModelSetup{}, SchemeFamily::regular(), s, {10000, 11, 1});
        std::vector<std::size_t> c;
        for (const auto& cell : r.cells) c.push_back(cell.count);
        counts.push_back(c);
    }
    for (std::size_t k = 1; k < counts.size(); ++k)
        for (std::size_t i = 0; i < counts[k].size(); ++i) CHECK(counts[k][i] <= counts[k - 1][i]);
}

TEST_CASE("summarize_tail censors unobserved cells") {
    const auto theory = legendre_rate(0.5, 1.0, VolatilityPath::constant(1.0));
    auto s = tail_at(0.5);
    const std::vector<std::size_t> counts = {900, 300, 0};
    const auto r = summarize_tail(s, counts, 10000, theory, 1);
    REQUIRE(r.cells.size() == 3);
    CHECK(r.cells[2].censored);
    CHECK(r.cells[2].log_slope == doctest::Approx(std::log(10000.0) / 100.0));
    CHECK(!r.cells[0].censored);
    CHECK(r.cells[0].phat == doctest::Approx(0.09));
    const std::vector<std::size_t> none = {0, 0, 0};
    CHECK_THROWS_AS(summarize_tail(s, none, 10000, theory, 1), UnderpoweredError);
    CHECK_THROWS_AS(summarize_tail(s, std::vector<std::size_t>{1, 2}, 10000, theory, 1), ParameterError);
}

TEST_CASE("mdp experiment argument checks") {
    MdpSettings s;
    s.u = 0.0;
    CHECK_THROWS_AS(mdp_experiment(ModelSetup{}, SchemeFamily::regular(), s, {100, 1, 1}), DomainError);
    s.u = 1.0;
    s.gamma = 0.5;
    CHECK_THROWS_AS(mdp_experiment(ModelSetup{}, SchemeFamily::regular(), s, {100, 1, 1}), ParameterError);
    s.gamma = 0.3;
    CHECK_THROWS_AS(mdp_experiment(ModelSetup{}, SchemeFamily::quantile_power(1.5), s, {100, 1, 1}), ParameterError);
}

TEST_CASE("moderate deviation variance for sigma = 2") {
    ModelSetup model;
    model.vol = VolatilityPath::constant(2.0);
    MdpSettings s;
    s.n = 1000;
    const auto r = mdp_experiment(model, SchemeFamily::regular(), s, {4000, 2, 1});
    CHECK(std::abs(r.theory_variance - 0.499665) < 1e-6);
    CHECK(std::abs(r.scaled_variance / r.theory_variance - 1.0) < 0.1);
    CHECK(r.m_n == doctest::Approx(std::pow(1000.0, 0.25)));
    CHECK(r.normality_p_value > 0.001);
    CHECK(to_csv(r).rows.size() == 1);
}

TEST_CASE("figure1 data") {
    const auto settings = Figure1Settings::paper_defaults();
    CHECK(settings.lambda_grid.size() == 401);
    CHECK(settings.x_grid.size() == 41);
    const auto flat = VolatilityPath::constant(1.0);
    const auto d = figure1_data(flat, settings);
    CHECK(d.curve_count == 41);
    CHECK(d.objective.rows.size() == 41 * 401);
    bool found = false;
    for (const auto& row : d.objective.rows)
        if (row[0] == "0" && row[1] == "0") {
            CHECK(row[2] == "0");
            found = true;
        }
    CHECK(found);

    const double i_half = legendre_rate(0.5, 1.0, flat).value;
    for (std::size_t k = 0; k < settings.x_grid.size(); ++k) {
        if (std::abs(settings.x_grid[k] - 0.5) < 1e-12) CHECK(d.grid_max[k] <= i_half + 1e-12);
        if (d.compared[k]) CHECK(d.grid_max[k] <= d.solver_rate[k] + 1e-12);
    }
    CHECK(d.max_discrepancy <= 1e-3);
    CHECK(d.pass);
    REQUIRE(d.boundaries.size() == 5);
    for (std::size_t k = 1; k < d.boundaries.size(); ++k) CHECK(d.boundaries[k].upper_x >= d.boundaries[k - 1].upper_x);
}

TEST_CASE("curve experiment basics") {
    CurveSettings s;
    s.u_grid = {0.0};
    s.n_list = {200};
    const auto zero = curve_experiment(ModelSetup{}, SchemeFamily::regular(), s, {500, 1, 1});
    CHECK(zero.empirical_cov == std::vector<double>{0.0});
    CHECK(zero.z_score == std::vector<double>{0.0});
    CHECK(zero.sup_norm == 1.0);

    s.u_grid = {0.5, 1.0, 2.0};
    s.n_list = {100, 400};
    s.tail_offset = 0.1;
    s.tail.bootstrap_replicates = 0;
    const auto r = curve_experiment(ModelSetup{}, SchemeFamily::regular(), s, {10000, 2, 1});
    CHECK(r.n == 400);
    CHECK(r.sup_norm <= 1.0);
    CHECK(r.empirical_cov.size() == 9);
    CHECK(r.tails.size() == 3);
    CHECK(r.max_abs_z < 4.0);
    CHECK(to_csv(r).rows.size() == 9);
}

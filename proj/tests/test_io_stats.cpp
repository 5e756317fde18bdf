#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "erltv/io.hpp"
#include "erltv/numeric.hpp"
#include "erltv/stats.hpp"

using namespace erltv;

TEST_CASE("format_double round-trips and names non-finite values") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-12) == "-2.5e-12");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(format_double(NAN) == "nan");
    const double v = 0.3678794411714423;
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("fnv1a_hex matches the reference digests") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("CsvTable writes comments, header and rows with LF endings") {
    CsvTable t;
    t.comments = {"config_hash=abc seed=1"};
    t.header = {"u", "v_n"};
    t.add_row({"0", "1"});
    t.add_row({"0.5", "0.75"});
    CHECK(t.to_string() == "# config_hash=abc seed=1\nu,v_n\n0,1\n0.5,0.75\n");

    const auto path = std::filesystem::temp_directory_path() / "erltv_csv_test.csv";
    t.write(path.string());
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == t.to_string());
    CHECK(ss.str().find('\r') == std::string::npos);
}

TEST_CASE("pairwise_sum is exact on integers and accurate on long sums") {
    std::vector<double> ones(100000, 1.0);
    CHECK(pairwise_sum(ones) == 100000.0);
    const double s = pairwise_sum(0, 1000000, [](std::size_t) { return 0.1; });
    CHECK(std::abs(s - 100000.0) < 1e-8);
}

TEST_CASE("derive_seed separates streams and is deterministic") {
    CHECK(derive_seed(1, 1) == derive_seed(1, 1));
    CHECK(derive_seed(1, 1) != derive_seed(1, 2));
    CHECK(derive_seed(1, 1) != derive_seed(2, 1));
}

TEST_CASE("sample moments") {
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    CHECK(stats::mean(xs) == doctest::Approx(2.5));
    CHECK(stats::variance(xs) == doctest::Approx(5.0 / 3.0));
    CHECK_THROWS_AS(stats::variance(std::vector<double>{1.0}), std::invalid_argument);
    CHECK(stats::quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(stats::quantile({0.0, 1.0}, 0.25) == doctest::Approx(0.25));
}

TEST_CASE("normal cdf and Kolmogorov p-values") {
    CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(stats::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    // asymptotic critical values of the Kolmogorov distribution
    CHECK(stats::kolmogorov_pvalue(1.358 / std::sqrt(1e8), 100000000) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(stats::kolmogorov_pvalue(1.628 / std::sqrt(1e8), 100000000) == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("KS test accepts normal draws and rejects shifted ones") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    std::vector<double> a(20000), b(20000);
    for (auto& v : a) v = z(rng);
    for (auto& v : b) v = z(rng) + 0.1;
    CHECK(stats::ks_standard_normal(a).p_value > 0.01);
    CHECK(stats::ks_standard_normal(b).p_value < 1e-6);
}

TEST_CASE("weighted line fit recovers an exact line and honours weights") {
    const std::vector<double> x = {0.0, 1.0, 2.0, 3.0}, y = {1.0, 3.0, 5.0, 7.0}, w = {1.0, 2.0, 3.0, 4.0};
    const auto fit = stats::weighted_line_fit(x, y, w);
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.slope == doctest::Approx(2.0));

    const std::vector<double> y2 = {0.0, 0.0, 0.0, 10.0}, heavy = {1.0, 1.0, 1.0, 1e-12};
    CHECK(std::abs(stats::weighted_line_fit(x, y2, heavy).slope) < 1e-9);
    CHECK(stats::loglog_slope(std::vector<double>{1, 10, 100}, std::vector<double>{1, 0.1, 0.01}) ==
          doctest::Approx(-1.0));
}

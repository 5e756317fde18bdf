#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace erltv::stats {

double mean(std::span<const double> xs);
/// Unbiased sample variance.
double variance(std::span<const double> xs);

double normal_cdf(double z);

/// Survival function of the Kolmogorov distribution with Stephens' finite-n correction.
double kolmogorov_pvalue(double d_statistic, std::size_t n);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test of xs against N(0, 1).
KsResult ks_standard_normal(std::vector<double> xs);

/// Weighted least squares fit of y = intercept + slope * x.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
};
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y, std::span<const double> weights);

/// Ordinary least squares slope of log(y) on log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Empirical quantile with linear interpolation, p in [0, 1]; sorts a copy.
double quantile(std::vector<double> xs, double p);

}  // namespace erltv::stats

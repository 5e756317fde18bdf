#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "erltv/market_model.hpp"
#include "erltv/simulator.hpp"

namespace erltv {

/// Raised when the regular-grid estimator is handed an irregular scheme.
class WrongEstimatorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a scheme contains a zero-length observation gap.
class DegenerateSchemeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ErltvCurve {
    std::vector<double> u_grid;
    std::vector<double> values;
};

/// Realized Laplace transform on a regular grid: (1/n) sum_i cos(sqrt(2 n u) dx_i).
double erltv_regular(std::span<const double> dx, double u);
double erltv_regular(const PathIncrements& path, double u);

/// Gap-weighted form: sum_i cos(sqrt(2 u / gap_i) dx_i) gap_i. On a regular
/// scheme this is computed exactly as erltv_regular.
double erltv_irregular(const SamplingScheme& scheme, std::span<const double> dx, double u);
double erltv_irregular(const PathIncrements& path, double u);

/// Dispatches on the scheme type.
double erltv(const SamplingScheme& scheme, std::span<const double> dx, double u);

/// Pointwise estimator over a nondecreasing grid of nonnegative u values.
ErltvCurve erltv_curve(const PathIncrements& path, std::span<const double> u_grid);
void erltv_curve_into(const SamplingScheme& scheme, std::span<const double> dx,
                      std::span<const double> u_grid, std::span<double> out);

/// Default experiment grid: 41 points on [0, 4].
std::vector<double> default_u_grid(double u_max = 4.0, std::size_t points = 41);

void write_curve_csv(const std::string& path, const ErltvCurve& curve,
                     std::span<const std::string> header_comments = {});

}  // namespace erltv

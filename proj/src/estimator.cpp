#include "erltv/estimator.hpp"

#include <cmath>

#include "erltv/io.hpp"
#include "erltv/numeric.hpp"

namespace erltv {

namespace {

void require_u(double u) {
    if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("estimator: u must be finite and nonnegative");
}

void require_sizes(const SamplingScheme& scheme, std::span<const double> dx) {
    if (dx.size() != scheme.size()) throw ParameterError("estimator: increments do not match the scheme");
}

}  // namespace

double erltv_regular(std::span<const double> dx, double u) {
    require_u(u);
    if (dx.empty()) throw ParameterError("estimator: no increments");
    const double n = static_cast<double>(dx.size());
    const double freq = std::sqrt(2.0 * n * u);
    const double total = pairwise_sum(0, dx.size(), [&](std::size_t i) { return std::cos(freq * dx[i]); });
    return total / n;
}

double erltv_regular(const PathIncrements& path, double u) {
    if (!path.scheme.is_regular())
        throw WrongEstimatorError("erltv_regular: scheme is irregular; use erltv_irregular");
    require_sizes(path.scheme, path.dx);
    return erltv_regular(path.dx, u);
}

double erltv_irregular(const SamplingScheme& scheme, std::span<const double> dx, double u) {
    require_u(u);
    require_sizes(scheme, dx);
    if (scheme.is_regular()) return erltv_regular(dx, u);
    const auto gaps = scheme.gaps();
    for (double g : gaps)
        if (!(g > 0.0)) throw DegenerateSchemeError("erltv_irregular: zero-length observation gap");
    return pairwise_sum(0, dx.size(), [&](std::size_t i) {
        return std::cos(std::sqrt(2.0 * u / gaps[i]) * dx[i]) * gaps[i];
    });
}

double erltv_irregular(const PathIncrements& path, double u) {
    return erltv_irregular(path.scheme, path.dx, u);
}

double erltv(const SamplingScheme& scheme, std::span<const double> dx, double u) {
    return erltv_irregular(scheme, dx, u);
}

void erltv_curve_into(const SamplingScheme& scheme, std::span<const double> dx,
                      std::span<const double> u_grid, std::span<double> out) {
    if (u_grid.empty()) throw ParameterError("erltv_curve: empty u grid");
    if (out.size() != u_grid.size()) throw ParameterError("erltv_curve: output size mismatch");
    for (std::size_t j = 0; j < u_grid.size(); ++j) {
        if (j > 0 && u_grid[j] < u_grid[j - 1]) throw ParameterError("erltv_curve: u grid must be nondecreasing");
        out[j] = erltv(scheme, dx, u_grid[j]);
    }
}

ErltvCurve erltv_curve(const PathIncrements& path, std::span<const double> u_grid) {
    ErltvCurve curve{{u_grid.begin(), u_grid.end()}, std::vector<double>(u_grid.size())};
    erltv_curve_into(path.scheme, path.dx, u_grid, curve.values);
    return curve;
}

std::vector<double> default_u_grid(double u_max, std::size_t points) {
    if (points < 2 || !(u_max > 0.0)) throw ParameterError("default_u_grid: need u_max > 0 and >= 2 points");
    std::vector<double> grid(points);
    for (std::size_t j = 0; j < points; ++j)
        grid[j] = u_max * static_cast<double>(j) / static_cast<double>(points - 1);
    return grid;
}

void write_curve_csv(const std::string& path, const ErltvCurve& curve,
                     std::span<const std::string> header_comments) {
    CsvTable table;
    table.comments.assign(header_comments.begin(), header_comments.end());
    table.header = {"u", "v_n"};
    for (std::size_t j = 0; j < curve.values.size(); ++j)
        table.add_row({format_double(curve.u_grid[j]), format_double(curve.values[j])});
    table.write(path);
}

}  // namespace erltv

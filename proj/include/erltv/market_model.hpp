#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace erltv {

/// Thrown when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown for invalid configuration of a model, scheme or numerical setting.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ContinuityClass { UniformlyContinuous, HalfHolder, Lipschitz };

std::string to_string(ContinuityClass c);

struct ConstantVol {
    double sigma0 = 1.0;
};

/// sigma(s) = sigma0 + amplitude * sin(frequency * s)
struct SinusoidVol {
    double sigma0 = 1.0;
    double amplitude = 0.0;
    double frequency = 0.0;
};

/// Node values on the uniform grid s_k = k / (m - 1), linearly interpolated.
struct PiecewiseGridVol {
    std::vector<double> values;
};

/// Mean-reverting volatility driven by a Brownian motion independent of W:
///   d sigma = kappa (theta - sigma) ds + eta sqrt(sigma) dB,  sigma(0) = theta,
/// floored at sigma_min.
struct CirVol {
    double kappa = 1.0;
    double theta = 1.0;
    double eta = 0.0;
};

/// Number of uniform cells used to realize a stochastic volatility path.
inline constexpr std::size_t kSigmaPathCells = std::size_t{1} << 16;

/// A deterministic realization s -> sigma_s on [0, 1]. Conditioning on the
/// volatility path amounts to holding one of these fixed.
class VolatilityPath {
public:
    static VolatilityPath constant(double sigma0);
    static VolatilityPath analytic(std::function<double(double)> fn, double sigma_min);
    /// Linear interpolation of values on the uniform grid k / (values.size() - 1).
    static VolatilityPath tabulated(std::vector<double> values);

    double operator()(double s) const;
    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return sigma0_; }
    double lower_bound() const { return sigma_min_; }

private:
    enum class Kind { Constant, Analytic, Tabulated };
    Kind kind_ = Kind::Constant;
    double sigma0_ = 1.0;
    double sigma_min_ = 1.0;
    std::function<double(double)> fn_;
    std::shared_ptr<const std::vector<double>> grid_;
};

class VolatilityModel {
public:
    using Spec = std::variant<ConstantVol, SinusoidVol, PiecewiseGridVol, CirVol>;

    /// sigma_min defaults to the smallest value the deterministic model attains.
    static VolatilityModel constant(double sigma0, std::optional<double> sigma_min = {});
    static VolatilityModel sinusoid(double sigma0, double amplitude, double frequency,
                                    std::optional<double> sigma_min = {});
    static VolatilityModel piecewise_grid(std::vector<double> values,
                                          std::optional<double> sigma_min = {});
    static VolatilityModel cir_like(double kappa, double theta, double eta, double sigma_min);

    const Spec& spec() const { return spec_; }
    double sigma_min() const { return sigma_min_; }
    ContinuityClass continuity_class() const;
    bool is_stochastic() const { return std::holds_alternative<CirVol>(spec_); }

    /// Materialize the path. Stochastic kinds require a seed; deterministic kinds ignore it.
    VolatilityPath realize(std::optional<std::uint64_t> path_seed = {}) const;

private:
    VolatilityModel(Spec spec, double sigma_min);
    Spec spec_;
    double sigma_min_;
};

/// Value of sigma_s. Stochastic paths are memoized per (model, seed).
double eval_sigma(const VolatilityModel& model, double s,
                  std::optional<std::uint64_t> path_seed = {});

/// F(u) = int_0^1 exp(-u sigma_s^2) ds by the composite midpoint rule.
std::vector<double> laplace_curve(const VolatilityPath& path, std::span<const double> u_grid,
                                  int steps = 512);
double laplace_value(const VolatilityPath& path, double u, int steps = 512);

struct ConstantDrift {
    double a0 = 0.0;
};

/// Drift values on the uniform grid k / (values.size() - 1), linearly interpolated.
struct GridDrift {
    std::vector<double> values;
};

class DriftSpec {
public:
    using Spec = std::variant<std::monostate, ConstantDrift, GridDrift>;

    static DriftSpec zero() { return DriftSpec{}; }
    static DriftSpec constant(double a0);
    static DriftSpec on_grid(std::vector<double> values);

    double operator()(double s) const;
    double bound() const { return bound_; }
    bool is_zero() const { return std::holds_alternative<std::monostate>(spec_); }
    bool is_constant() const { return !std::holds_alternative<GridDrift>(spec_); }
    const Spec& spec() const { return spec_; }

private:
    Spec spec_;
    double bound_ = 0.0;
};

struct NormalJumpSize {
    double mean = 0.0;
    double stddev = 0.1;
};

/// Symmetric double-exponential sizes with the given mean absolute size.
struct LaplaceJumpSize {
    double mean_abs = 0.1;
};

using JumpSizeSampler = std::variant<NormalJumpSize, LaplaceJumpSize>;

struct CompoundPoissonJumps {
    double intensity_per_unit_time = 0.0;
    JumpSizeSampler sizes = NormalJumpSize{};
};

/// Levy density scale * |x|^{-1-beta} restricted to epsilon <= |x| <= 1.
struct TruncatedStableJumps {
    double beta = 0.5;
    double scale = 0.0;
    double epsilon = 1e-3;
};

class JumpSpec {
public:
    using Spec = std::variant<std::monostate, CompoundPoissonJumps, TruncatedStableJumps>;

    static JumpSpec none() { return JumpSpec{}; }
    static JumpSpec compound_poisson(double intensity_per_unit_time, JumpSizeSampler sizes);
    /// Rejects beta >= 1: the jump part must have finite variation.
    static JumpSpec truncated_stable(double beta, double scale, double epsilon);

    const Spec& spec() const { return spec_; }
    /// Blumenthal-Getoor index of the configured jump measure.
    double beta() const;
    /// Total jump arrival rate per unit time.
    double intensity() const;
    bool is_none() const { return intensity() == 0.0; }

private:
    Spec spec_;
};

/// Thrown when a sampling scheme breaks one of the clauses of the admissibility conditions.
class SchemeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SchemeDiagnostics {
    double sqrt_n_max_gap = 0.0;   ///< sqrt(n) * max gap, should vanish as n grows
    double n_sum_squared_gaps = 0.0;  ///< n * sum gap^2, should stay bounded
};

class SamplingScheme {
public:
    static SamplingScheme regular(std::size_t n);
    /// Times must start at 0, increase strictly, end at or before 1, and have at
    /// most n gaps. Times that coincide with a regular grid of n cells are
    /// stored as that regular scheme.
    static SamplingScheme irregular(std::vector<double> times, std::size_t n);
    /// t_i = inverse_T(i / n), i = 0..n.
    static SamplingScheme quantile(std::size_t n, const std::function<double(double)>& inverse_T);

    bool is_regular() const { return regular_; }
    std::size_t n() const { return n_; }
    std::size_t size() const { return gaps_.size(); }
    std::span<const double> times() const { return *times_; }
    std::span<const double> gaps() const { return gaps_; }
    double end_time() const { return times_->back(); }
    SchemeDiagnostics diagnostics() const;

private:
    SamplingScheme() = default;
    bool regular_ = true;
    std::size_t n_ = 0;
    std::shared_ptr<const std::vector<double>> times_;
    std::vector<double> gaps_;
};

/// Convenience wrapper returning the validated scheme with its diagnostics.
struct BuiltScheme {
    SamplingScheme scheme;
    SchemeDiagnostics diagnostics;
};
BuiltScheme build_scheme(std::size_t n);
BuiltScheme build_scheme(std::vector<double> times, std::size_t n);

/// Reads a single column of increasing times (blank lines and '#' comments ignored).
std::vector<double> read_times_file(const std::string& path);

/// Verdict of a diagnostic sweep over increasing n.
struct DiagnosticTrend {
    std::vector<std::size_t> n_values;
    std::vector<SchemeDiagnostics> diagnostics;
    bool max_gap_vanishing = false;  ///< sqrt(n) max gap strictly decreasing
    bool sum_squares_bounded = false;  ///< n sum gap^2 not increasing beyond tolerance
};
DiagnosticTrend diagnostic_trend(std::span<const std::size_t> n_values,
                                 const std::function<SamplingScheme(std::size_t)>& family,
                                 double growth_tolerance = 0.05);

struct TimeChangeValue {
    double value = 0.0;       ///< T_n(s)
    double derivative = 0.0;  ///< T_n'(s)
    bool saturated = false;   ///< s beyond the last observation time
};

/// Empirical time change T_n of a scheme and its piecewise-constant density.
TimeChangeValue time_change(const SamplingScheme& scheme, double s);

/// Limiting time change: a positive bounded density T' on [0, 1] and T(s) = int_0^s T'.
class TimeChange {
public:
    static TimeChange identity();
    static TimeChange constant(double density);
    /// T(s) = s^p, T'(s) = p s^{p-1}.
    static TimeChange power(double p);
    /// Density supplied directly; T is integrated numerically.
    static TimeChange from_density(std::function<double(double)> density, int panels = 4096);
    /// Piecewise-constant density T_n' of a concrete scheme.
    static TimeChange from_scheme(const SamplingScheme& scheme);

    double density(double s) const { return density_(s); }
    double cumulative(double s) const;
    bool is_identity() const { return identity_; }

    /// Checks T' > 0 and finite on the midpoints of a uniform grid.
    bool density_positive_on(int panels) const;

private:
    bool identity_ = false;
    std::function<double(double)> density_;
    std::function<double(double)> cumulative_;
};

}  // namespace erltv

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "erltv/market_model.hpp"

namespace erltv {

struct QuadratureSettings {
    int hermite_nodes = 200;
    double domain_halfwidth_sigmas = 12.0;  ///< minimum half-width of the trapezoid fallback
    int time_panels = 512;
    double tolerance = 1e-10;
    /// Lets the inner rule switch away from Gauss-Hermite when the integrand is
    /// not resolved by hermite_nodes. Disabling it pins the rule to Gauss-Hermite.
    bool adaptive = true;
    /// Applies the time-change density when one is supplied.
    bool apply_time_change = true;

    void validate() const;
};

/// Inner rule picked for a given Gaussian scale and tilt.
enum class InnerRule { GaussHermite, Trapezoid };

/// Integrals of the form E[exp(coef * cos(scale * Z))] with Z ~ N(0, 1), along
/// with the mean and variance of cos(scale * Z) under the exponentially tilted law.
struct TiltedMoments {
    double log_mgf = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    InnerRule rule = InnerRule::GaussHermite;
};

TiltedMoments cosine_tilt(double scale, double coef, const QuadratureSettings& q);

/// Gauss-Hermite nodes and weights for the standard normal measure (weights sum to 1).
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const HermiteRule& hermite_rule(int nodes);

/// Lambda(lambda, u) and its first two lambda-derivatives.
struct LambdaValue {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
    bool degenerate_u = false;
};

/// Limiting log moment generating function
///   Lambda(lambda, u) = int_0^1 T'(s) log E exp(lambda cos(sqrt(2u) sigma_s Z) / T'(s)) ds,
/// with T' = 1 when no time change is given. At u = 0 the value is lambda.
LambdaValue lambda_eval(double lambda, double u, const VolatilityPath& vol,
                        const TimeChange* tprime = nullptr, const QuadratureSettings& q = {});

double lambda_point(double lambda, double u, const VolatilityPath& vol, const TimeChange* tprime = nullptr,
                    const QuadratureSettings& q = {});

struct LambdaDerivs {
    double first = 0.0;
    double second = 0.0;
};
LambdaDerivs lambda_derivs(double lambda, double u, const VolatilityPath& vol,
                           const TimeChange* tprime = nullptr, const QuadratureSettings& q = {});

enum class RateStatus { Converged, DomainTruncated, InfiniteOutsideUnitInterval, DegenerateU };

std::string to_string(RateStatus s);

struct RateFunctionResult {
    double x = 0.0;
    double u = 0.0;
    double lambda_star = 0.0;  ///< +-infinity when no maximizer exists
    double value = 0.0;        ///< +infinity outside [-1, 1]
    RateStatus status = RateStatus::Converged;
};

struct LegendreSolver {
    double lambda_max = 200.0;
    int max_iterations = 200;
};

/// Thrown when the root finder cannot reach the tolerance; carries the bracket.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double lo, double hi)
        : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

/// I(x, u) = sup_lambda { lambda x - Lambda(lambda, u) }, solved through
/// Lambda'(lambda) = x with a bracketed Newton iteration.
RateFunctionResult legendre_rate(double x, double u, const VolatilityPath& vol,
                                 const TimeChange* tprime = nullptr, const QuadratureSettings& q = {},
                                 const LegendreSolver& solver = {});

/// Multi-point log-MGF
///   int_0^1 log E exp(sum_j lambda_j cos(sqrt(2 u_j) sigma_s Z)) ds.
double lambda_partition(std::span<const double> lambdas, std::span<const double> us, const VolatilityPath& vol,
                        const QuadratureSettings& q = {});

/// Asymptotic covariance of sqrt(n) (V_n(u1), V_n(u2)):
///   int_0^1 (exp(-(sqrt u1 + sqrt u2)^2 sigma^2 / 2) - exp(-(sqrt u1 - sqrt u2)^2 sigma^2 / 2))^2 / (2 T') ds.
double clt_covariance(double u1, double u2, const VolatilityPath& vol, const TimeChange* tprime = nullptr,
                      const QuadratureSettings& q = {});

/// Covariance matrix over a u grid, row-major.
std::vector<double> clt_covariance_matrix(std::span<const double> us, const VolatilityPath& vol,
                                          const TimeChange* tprime = nullptr, const QuadratureSettings& q = {});

struct MdpRate {
    double value = 0.0;
    bool degenerate = false;  ///< zero asymptotic variance
};

/// Moderate deviation rate x^2 / (2 clt_covariance(u, u)).
MdpRate mdp_rate(double x, double u, const VolatilityPath& vol, const TimeChange* tprime = nullptr,
                 const QuadratureSettings& q = {});

/// Quadratic log-MGF of the moderate deviation finite-dimensional laws.
double mdp_process_form(std::span<const double> lambdas, std::span<const double> us, const VolatilityPath& vol,
                        const QuadratureSettings& q = {});

/// int I(phi(u), u) du over the grid by the trapezoid rule; +infinity if any node is infinite.
double process_rate_lower_bound(std::span<const double> u_grid, std::span<const double> phi,
                                const VolatilityPath& vol, const QuadratureSettings& q = {},
                                const LegendreSolver& solver = {});

/// log(I_0(lambda) + 2 sum_{k=1..terms} I_k(lambda) exp(-k^2 u sigma0^2)): the constant-volatility
/// log-MGF through the Fourier-Bessel expansion of exp(lambda cos y).
double bessel_oracle(double lambda, double u, double sigma0, int terms = 40);

}  // namespace erltv

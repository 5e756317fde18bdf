#include "erltv/rate_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <tuple>

#include <Eigen/Eigenvalues>

#include "erltv/numeric.hpp"

namespace erltv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-Hermite resolves cos(w Z) under N(0, 1) to ~1e-12 for w <= 0.9 sqrt(nodes).
constexpr double kHermiteResolution = 0.9;
// Tilts beyond this push mass far enough from the origin that the Hermite
// grid is no longer trusted.
constexpr double kHermiteMaxTilt = 30.0;

/// Harmonics of exp(c cos t) beyond this index carry relative weight below ~1e-13.
double harmonic_bandwidth(double abs_coef) { return 12.0 + 8.0 * std::sqrt(abs_coef); }

HermiteRule compute_hermite_rule(int n) {
    // Golub-Welsch eigenvalues of the Jacobi matrix for the weight exp(-x^2),
    // polished by Newton on the orthonormal recurrence. Weights come from the
    // recurrence derivative, which keeps tiny tail weights relatively accurate.
    constexpr double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const auto size = static_cast<std::size_t>(n);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& roots = solver.eigenvalues();

    auto recurrence = [n](double z) {
        double p1 = pim4, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
        }
        return std::pair{p1, std::sqrt(2.0 * n) * p2};
    };

    HermiteRule rule;
    rule.nodes.resize(size);
    rule.weights.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        double z = roots[static_cast<Eigen::Index>(i)];
        auto [p, dp] = recurrence(z);
        for (int it = 0; it < 3; ++it) {
            z -= p / dp;
            std::tie(p, dp) = recurrence(z);
        }
        rule.nodes[i] = std::numbers::sqrt2 * z;
        rule.weights[i] = 2.0 / (dp * dp) / std::sqrt(std::numbers::pi);
    }
    return rule;
}

/// log E[exp(g(Z))] and the tilted mean and variance of h(Z), by a normalized rule.
template <class Exponent, class Observable>
TiltedMoments tilt_integral(const Exponent& g, const Observable& h, double bandwidth, double abs_coef,
                            const QuadratureSettings& q, bool want_moments) {
    TiltedMoments out;
    const bool use_hermite =
        !q.adaptive ||
        (bandwidth <= kHermiteResolution * std::sqrt(static_cast<double>(q.hermite_nodes)) &&
         abs_coef <= kHermiteMaxTilt);

    const HermiteRule* rule = nullptr;
    double step = 0.0;
    std::size_t count = 0;
    double half_width = 0.0;
    if (use_hermite) {
        rule = &hermite_rule(q.hermite_nodes);
        count = rule->nodes.size();
        out.rule = InnerRule::GaussHermite;
    } else {
        half_width = std::max(q.domain_halfwidth_sigmas, std::sqrt(4.0 * abs_coef + 100.0));
        step = std::min(0.5, 2.0 * std::numbers::pi / (bandwidth + 12.0));
        const auto half_count = static_cast<std::size_t>(std::ceil(half_width / step));
        count = 2 * half_count + 1;
        half_width = static_cast<double>(half_count) * step;
        out.rule = InnerRule::Trapezoid;
    }
    auto node = [&](std::size_t j) {
        return rule ? rule->nodes[j] : -half_width + static_cast<double>(j) * step;
    };
    auto log_weight = [&](std::size_t j) {
        if (rule) return std::log(rule->weights[j]);
        const double z = node(j);
        return -0.5 * z * z;
    };

    std::vector<double> lw(count), ex(count);
    double shift = -kInf;
    for (std::size_t j = 0; j < count; ++j) {
        lw[j] = log_weight(j);
        ex[j] = g(node(j));
        shift = std::max(shift, lw[j] + ex[j]);
    }
    double norm_shift = -kInf;
    for (double v : lw) norm_shift = std::max(norm_shift, v);

    std::vector<double> mass(count);
    for (std::size_t j = 0; j < count; ++j) mass[j] = std::exp(lw[j] + ex[j] - shift);
    const double s0 = pairwise_sum(mass);
    const double norm = pairwise_sum(0, count, [&](std::size_t j) { return std::exp(lw[j] - norm_shift); });
    out.log_mgf = (shift + std::log(s0)) - (norm_shift + std::log(norm));

    if (want_moments) {
        std::vector<double> obs(count);
        for (std::size_t j = 0; j < count; ++j) obs[j] = h(node(j));
        const double s1 = pairwise_sum(0, count, [&](std::size_t j) { return mass[j] * obs[j]; });
        out.mean = s1 / s0;
        const double s2 = pairwise_sum(0, count, [&](std::size_t j) {
            const double d = obs[j] - out.mean;
            return mass[j] * d * d;
        });
        out.variance = s2 / s0;
    }
    return out;
}

const TimeChange* effective_time_change(const TimeChange* tprime, const QuadratureSettings& q) {
    if (!tprime || !q.apply_time_change || tprime->is_identity()) return nullptr;
    return tprime;
}

/// int_0^1 f(s) ds by the composite midpoint rule, or f evaluated once when the
/// integrand does not depend on s.
template <class Integrand>
double time_integral(bool constant_integrand, const QuadratureSettings& q, const Integrand& f) {
    if (constant_integrand) return f(0.5);
    const int panels = q.time_panels;
    const double total = pairwise_sum(0, static_cast<std::size_t>(panels),
                                      [&](std::size_t k) { return f((static_cast<double>(k) + 0.5) / panels); });
    return total / panels;
}

void require_finite_lambda(double lambda) {
    if (!std::isfinite(lambda)) throw ParameterError("lambda must be finite");
}

void require_nonneg_u(double u, const char* what) {
    if (!(u >= 0.0) || !std::isfinite(u)) {
        std::ostringstream msg;
        msg << what << ": u must be finite and nonnegative, got " << u;
        throw DomainError(msg.str());
    }
}

double cross_term(double u1, double u2, double sigma2) {
    const double a = std::sqrt(u1), b = std::sqrt(u2);
    const double plus = std::exp(-(a + b) * (a + b) * sigma2 / 2.0);
    const double minus = std::exp(-(a - b) * (a - b) * sigma2 / 2.0);
    return (plus - minus) * (plus - minus);
}

}  // namespace

void QuadratureSettings::validate() const {
    if (hermite_nodes < 16) throw ParameterError("hermite_nodes must be >= 16");
    if (!(tolerance > 0.0)) throw ParameterError("quadrature tolerance must be positive");
    if (time_panels < 1) throw ParameterError("time_panels must be >= 1");
    if (!(domain_halfwidth_sigmas > 0.0)) throw ParameterError("domain_halfwidth_sigmas must be positive");
}

const HermiteRule& hermite_rule(int nodes) {
    if (nodes < 1 || nodes > 600) throw ParameterError("hermite_rule: node count must lie in [1, 600]");
    static std::mutex mutex;
    static std::map<int, HermiteRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(nodes);
    if (it == cache.end()) it = cache.emplace(nodes, compute_hermite_rule(nodes)).first;
    return it->second;
}

TiltedMoments cosine_tilt(double scale, double coef, const QuadratureSettings& q) {
    const double abs_coef = std::abs(coef);
    auto moments = tilt_integral([&](double z) { return coef * std::cos(scale * z); },
                                 [&](double z) { return std::cos(scale * z); },
                                 harmonic_bandwidth(abs_coef) * std::abs(scale), abs_coef, q, true);
    if (coef == 0.0) moments.log_mgf = 0.0;
    return moments;
}

LambdaValue lambda_eval(double lambda, double u, const VolatilityPath& vol, const TimeChange* tprime,
                        const QuadratureSettings& q) {
    require_finite_lambda(lambda);
    require_nonneg_u(u, "lambda_point");
    if (u == 0.0) return {lambda, 1.0, 0.0, true};

    const TimeChange* tp = effective_time_change(tprime, q);
    const bool constant = vol.is_constant() && tp == nullptr;
    const double root2u = std::sqrt(2.0 * u);

    auto at = [&](double s) {
        const double density = tp ? tp->density(s) : 1.0;
        const auto m = cosine_tilt(root2u * vol(s), lambda / density, q);
        return std::array<double, 3>{density * m.log_mgf, m.mean, m.variance / density};
    };
    if (constant) {
        const auto v = at(0.5);
        return {v[0], v[1], v[2], false};
    }
    const int panels = q.time_panels;
    std::vector<std::array<double, 3>> parts(static_cast<std::size_t>(panels));
    for (int k = 0; k < panels; ++k) parts[static_cast<std::size_t>(k)] = at((k + 0.5) / panels);
    LambdaValue out;
    out.value = pairwise_sum(0, parts.size(), [&](std::size_t k) { return parts[k][0]; }) / panels;
    out.first = pairwise_sum(0, parts.size(), [&](std::size_t k) { return parts[k][1]; }) / panels;
    out.second = pairwise_sum(0, parts.size(), [&](std::size_t k) { return parts[k][2]; }) / panels;
    return out;
}

double lambda_point(double lambda, double u, const VolatilityPath& vol, const TimeChange* tprime,
                    const QuadratureSettings& q) {
    return lambda_eval(lambda, u, vol, tprime, q).value;
}

LambdaDerivs lambda_derivs(double lambda, double u, const VolatilityPath& vol, const TimeChange* tprime,
                           const QuadratureSettings& q) {
    const auto v = lambda_eval(lambda, u, vol, tprime, q);
    return {v.first, v.second};
}

std::string to_string(RateStatus s) {
    switch (s) {
        case RateStatus::Converged: return "converged";
        case RateStatus::DomainTruncated: return "domain-truncated";
        case RateStatus::InfiniteOutsideUnitInterval: return "infinite-by-proposition-1";
        case RateStatus::DegenerateU: return "degenerate-u";
    }
    return "unknown";
}

RateFunctionResult legendre_rate(double x, double u, const VolatilityPath& vol, const TimeChange* tprime,
                                 const QuadratureSettings& q, const LegendreSolver& solver) {
    if (!std::isfinite(x)) throw ParameterError("legendre_rate: x must be finite");
    require_nonneg_u(u, "legendre_rate");
    RateFunctionResult r{x, u, 0.0, 0.0, RateStatus::Converged};

    if (std::abs(x) > 1.0) {
        r.lambda_star = x > 0 ? kInf : -kInf;
        r.value = kInf;
        r.status = RateStatus::InfiniteOutsideUnitInterval;
        return r;
    }
    if (u == 0.0) {
        // V_n(0) = 1 deterministically.
        r.status = RateStatus::DegenerateU;
        r.value = x == 1.0 ? 0.0 : kInf;
        r.lambda_star = x == 1.0 ? 0.0 : (x > 1.0 ? kInf : -kInf);
        return r;
    }

    auto slope = [&](double lambda) { return lambda_eval(lambda, u, vol, tprime, q); };
    const auto at_zero = slope(0.0);
    if (std::abs(at_zero.first - x) <= q.tolerance) return r;

    const double direction = x > at_zero.first ? 1.0 : -1.0;
    // Bracket the root of Lambda'(lambda) = x on the side indicated by direction.
    double inner = 0.0;
    double outer = direction;
    LambdaValue outer_value = slope(outer);
    while ((outer_value.first - x) * direction < 0.0) {
        if (std::abs(outer) >= solver.lambda_max) {
            r.lambda_star = direction * solver.lambda_max;
            r.value = std::max(direction * solver.lambda_max * x - outer_value.value, 0.0);
            r.status = RateStatus::DomainTruncated;
            return r;
        }
        inner = outer;
        outer = direction * std::min(2.0 * std::abs(outer), solver.lambda_max);
        outer_value = slope(outer);
    }

    double lo = std::min(inner, outer), hi = std::max(inner, outer);
    double lambda = 0.5 * (lo + hi);
    LambdaValue cur = slope(lambda);
    for (int it = 0; it < solver.max_iterations; ++it) {
        const double resid = cur.first - x;
        if (std::abs(resid) <= q.tolerance || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lambda))) {
            r.lambda_star = lambda;
            r.value = std::max(lambda * x - cur.value, 0.0);
            return r;
        }
        if (resid < 0.0)
            lo = lambda;
        else
            hi = lambda;
        double next = cur.second > 0.0 ? lambda - resid / cur.second : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        lambda = next;
        cur = slope(lambda);
    }
    throw NumericalFailure("legendre_rate: tolerance not reached within the iteration cap", lo, hi);
}

double lambda_partition(std::span<const double> lambdas, std::span<const double> us, const VolatilityPath& vol,
                        const QuadratureSettings& q) {
    if (lambdas.size() != us.size()) throw ParameterError("lambda_partition: lambda and u vectors differ in length");
    if (lambdas.empty()) throw ParameterError("lambda_partition: need at least one point");
    double abs_coef = 0.0;
    double max_freq = 0.0;
    std::vector<double> freqs(us.size());
    for (std::size_t j = 0; j < us.size(); ++j) {
        require_finite_lambda(lambdas[j]);
        require_nonneg_u(us[j], "lambda_partition");
        if (j > 0 && us[j] < us[j - 1]) throw ParameterError("lambda_partition: u values must be nondecreasing");
        abs_coef += std::abs(lambdas[j]);
        freqs[j] = std::sqrt(2.0 * us[j]);
        max_freq = std::max(max_freq, freqs[j]);
    }
    if (abs_coef == 0.0) return 0.0;

    auto inner = [&](double s) {
        const double sigma = vol(s);
        auto g = [&](double z) {
            double acc = 0.0;
            for (std::size_t j = 0; j < freqs.size(); ++j) acc += lambdas[j] * std::cos(freqs[j] * sigma * z);
            return acc;
        };
        return tilt_integral(g, [](double) { return 0.0; }, harmonic_bandwidth(abs_coef) * max_freq * sigma,
                             abs_coef, q, false)
            .log_mgf;
    };
    return time_integral(vol.is_constant(), q, inner);
}

double clt_covariance(double u1, double u2, const VolatilityPath& vol, const TimeChange* tprime,
                      const QuadratureSettings& q) {
    require_nonneg_u(u1, "clt_covariance");
    require_nonneg_u(u2, "clt_covariance");
    const TimeChange* tp = effective_time_change(tprime, q);
    return time_integral(vol.is_constant() && tp == nullptr, q, [&](double s) {
        const double sigma = vol(s);
        const double density = tp ? tp->density(s) : 1.0;
        return cross_term(u1, u2, sigma * sigma) / (2.0 * density);
    });
}

std::vector<double> clt_covariance_matrix(std::span<const double> us, const VolatilityPath& vol,
                                          const TimeChange* tprime, const QuadratureSettings& q) {
    const std::size_t k = us.size();
    std::vector<double> m(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) m[i * k + j] = m[j * k + i] = clt_covariance(us[i], us[j], vol, tprime, q);
    return m;
}

MdpRate mdp_rate(double x, double u, const VolatilityPath& vol, const TimeChange* tprime,
                 const QuadratureSettings& q) {
    require_nonneg_u(u, "mdp_rate");
    const double variance = clt_covariance(u, u, vol, tprime, q);
    if (x == 0.0) return {0.0, variance == 0.0};
    if (variance == 0.0) return {kInf, true};
    return {x * x / (2.0 * variance), false};
}

double mdp_process_form(std::span<const double> lambdas, std::span<const double> us, const VolatilityPath& vol,
                        const QuadratureSettings& q) {
    if (lambdas.size() != us.size()) throw ParameterError("mdp_process_form: lambda and u vectors differ in length");
    for (std::size_t j = 0; j < us.size(); ++j) {
        require_finite_lambda(lambdas[j]);
        require_nonneg_u(us[j], "mdp_process_form");
    }
    return time_integral(vol.is_constant(), q, [&](double s) {
        const double sigma = vol(s);
        const double s2 = sigma * sigma;
        double diag = 0.0, off = 0.0;
        for (std::size_t j = 0; j < us.size(); ++j) {
            const double one_minus = 1.0 - std::exp(-2.0 * us[j] * s2);
            diag += lambdas[j] * lambdas[j] * one_minus * one_minus;
            for (std::size_t l = j + 1; l < us.size(); ++l) off += lambdas[j] * lambdas[l] * cross_term(us[j], us[l], s2);
        }
        return 0.25 * diag + 0.5 * off;
    });
}

double process_rate_lower_bound(std::span<const double> u_grid, std::span<const double> phi,
                                const VolatilityPath& vol, const QuadratureSettings& q,
                                const LegendreSolver& solver) {
    if (u_grid.size() != phi.size()) throw ParameterError("process_rate_lower_bound: grid and phi differ in length");
    if (u_grid.size() < 2) throw ParameterError("process_rate_lower_bound: need at least two grid points");
    std::vector<double> rates(u_grid.size());
    for (std::size_t k = 0; k < u_grid.size(); ++k) {
        if (k > 0 && !(u_grid[k] > u_grid[k - 1]))
            throw ParameterError("process_rate_lower_bound: u grid must be strictly increasing");
        rates[k] = legendre_rate(phi[k], u_grid[k], vol, nullptr, q, solver).value;
        if (std::isinf(rates[k])) return kInf;
    }
    return pairwise_sum(0, rates.size() - 1, [&](std::size_t k) {
        return 0.5 * (rates[k] + rates[k + 1]) * (u_grid[k + 1] - u_grid[k]);
    });
}

double bessel_oracle(double lambda, double u, double sigma0, int terms) {
    if (!(u > 0.0) || !(sigma0 > 0.0)) throw ParameterError("bessel_oracle: u and sigma0 must be positive");
    if (terms < 5) throw ParameterError("bessel_oracle: need at least 5 terms");
    require_finite_lambda(lambda);
    const double a = std::abs(lambda);
    const double sign = lambda < 0.0 ? -1.0 : 1.0;
    double sum = std::cyl_bessel_i(0.0, a);
    double parity = 1.0;
    for (int k = 1; k <= terms; ++k) {
        parity *= sign;
        sum += 2.0 * parity * std::cyl_bessel_i(static_cast<double>(k), a) *
               std::exp(-static_cast<double>(k) * k * u * sigma0 * sigma0);
    }
    return std::log(sum);
}

}  // namespace erltv

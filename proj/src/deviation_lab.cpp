#include "erltv/deviation_lab.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <boost/random/binomial_distribution.hpp>

#include "erltv/estimator.hpp"
#include "erltv/numeric.hpp"
#include "erltv/stats.hpp"

namespace erltv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kBootstrapStream = 0xB0075;

const TimeChange* limit_of(const SchemeFamily& family) { return family.irregular ? &family.limit : nullptr; }

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

std::size_t resolve_workers(std::size_t requested, std::size_t jobs) {
    std::size_t w = requested;
    if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(w, jobs));
}

bool event(double v, double x, TailSide side) { return side == TailSide::Upper ? v >= x : v <= x; }

// Intercept of -(1/n) log p against 1/n, weighted by the inverse delta-method variance.
std::optional<double> fit_intercept(std::span<const TailCell> cells, std::size_t num_paths, SlopeModel model) {
    std::vector<double> xs, ys, ws;
    for (const auto& c : cells) {
        if (c.censored) continue;
        const double n = static_cast<double>(c.n);
        double y = c.log_slope;
        if (model == SlopeModel::BahadurRao) y -= std::log(n) / (2.0 * n);
        const double q = std::max(1.0 - c.phat, 1.0 / static_cast<double>(num_paths));
        xs.push_back(1.0 / n);
        ys.push_back(y);
        ws.push_back(n * n * static_cast<double>(num_paths) * c.phat / q);
    }
    if (xs.empty()) return std::nullopt;
    if (xs.size() == 1) return ys.front();
    return stats::weighted_line_fit(xs, ys, ws).intercept;
}

TailCell make_cell(std::size_t n, std::size_t count, std::size_t num_paths) {
    TailCell c;
    c.n = n;
    c.count = count;
    const double N = static_cast<double>(num_paths);
    c.phat = static_cast<double>(count) / N;
    c.std_error = std::sqrt(c.phat * (1.0 - c.phat) / N);
    if (count == 0) {
        c.censored = true;
        c.log_slope = std::log(N) / static_cast<double>(n);
    } else {
        c.log_slope = -std::log(c.phat) / static_cast<double>(n);
    }
    return c;
}

bool certified_impossible(double x, TailSide side) { return side == TailSide::Upper ? x > 1.0 : x < -1.0; }

void check_tail_settings(const TailSettings& s) {
    if (s.n_list.empty()) throw ParameterError("tail experiment: n_list must not be empty");
    for (std::size_t i = 0; i < s.n_list.size(); ++i) {
        if (s.n_list[i] == 0) throw ParameterError("tail experiment: n values must be positive");
        if (i > 0 && s.n_list[i] <= s.n_list[i - 1])
            throw ParameterError("tail experiment: n_list must be strictly increasing");
    }
    if (!(s.u >= 0.0) || !std::isfinite(s.u)) throw DomainError("tail experiment: u must be finite and >= 0");
    if (!std::isfinite(s.x)) throw DomainError("tail experiment: x must be finite");
    if (!(s.rel_tolerance >= 0.0) || !(s.abs_tolerance >= 0.0))
        throw ParameterError("tail experiment: tolerances must be >= 0");
    if (s.bootstrap_replicates < 0) throw ParameterError("tail experiment: bootstrap_replicates must be >= 0");
    s.quadrature.validate();
}

}  // namespace

SchemeFamily SchemeFamily::regular() {
    SchemeFamily f;
    f.make = [](std::size_t n) { return SamplingScheme::regular(n); };
    f.limit = TimeChange::identity();
    f.irregular = false;
    f.description = "regular";
    return f;
}

SchemeFamily SchemeFamily::quantile_power(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("quantile scheme: power must be positive");
    SchemeFamily f;
    f.make = [p](std::size_t n) {
        return SamplingScheme::quantile(n, [p](double v) { return std::pow(v, 1.0 / p); });
    };
    f.limit = TimeChange::power(p);
    f.irregular = p != 1.0;
    f.description = "quantile power " + format_double(p);
    return f;
}

SchemeFamily SchemeFamily::fixed(SamplingScheme scheme) {
    SchemeFamily f;
    f.irregular = !scheme.is_regular();
    f.limit = f.irregular ? TimeChange::from_scheme(scheme) : TimeChange::identity();
    f.description = f.irregular ? "fixed irregular" : "fixed regular";
    f.make = [scheme = std::move(scheme)](std::size_t) { return scheme; };
    return f;
}

std::vector<double> simulate_estimates(const ModelSetup& model, const SamplingScheme& scheme,
                                       std::span<const double> u_grid, const MonteCarloSettings& mc) {
    if (u_grid.empty()) throw ParameterError("simulate_estimates: u grid must not be empty");
    const std::size_t k = u_grid.size();
    const std::size_t paths = mc.num_paths;
    std::vector<double> out(paths * k);
    if (paths == 0) return out;

    const IncrementSimulator sim(model.vol, model.drift, model.jumps, scheme, model.substeps);
    const std::uint64_t base = derive_seed(mc.seed, scheme.n());
    const std::vector<double> grid(u_grid.begin(), u_grid.end());
    // validates the grid once, before any worker starts
    {
        std::vector<double> dx(scheme.size(), 0.0), tmp(k);
        erltv_curve_into(scheme, dx, grid, tmp);
    }

    const std::size_t workers = resolve_workers(mc.workers, paths);
    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<double> dx(scheme.size());
        for (std::size_t p = begin; p < end; ++p) {
            sim.fill(derive_seed(base, p), dx);
            erltv_curve_into(scheme, dx, grid, std::span<double>(out.data() + p * k, k));
        }
    };
    if (workers == 1) {
        work(0, paths);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (paths + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(paths, w * chunk), end = std::min(paths, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string to_string(TailSide side) { return side == TailSide::Upper ? "upper" : "lower"; }

std::string to_string(SlopeModel m) {
    switch (m) {
        case SlopeModel::Auto: return "auto";
        case SlopeModel::Plain: return "plain";
        case SlopeModel::BahadurRao: return "bahadur-rao";
    }
    return "unknown";
}

TailExperimentReport summarize_tail(const TailSettings& settings, std::span<const std::size_t> counts,
                                    std::size_t num_paths, const RateFunctionResult& theory, std::uint64_t seed) {
    if (counts.size() != settings.n_list.size())
        throw ParameterError("summarize_tail: one count per n is required");
    TailExperimentReport r;
    r.u = settings.u;
    r.x = settings.x;
    r.side = settings.side;
    r.num_paths = num_paths;
    r.theory = theory;
    r.rel_tolerance = settings.rel_tolerance;
    r.abs_tolerance = settings.abs_tolerance;
    for (std::size_t i = 0; i < counts.size(); ++i) r.cells.push_back(make_cell(settings.n_list[i], counts[i], num_paths));

    r.slope_model = settings.slope_model;
    if (r.slope_model == SlopeModel::Auto)
        r.slope_model = (theory.status == RateStatus::Converged && std::abs(theory.lambda_star) > 1e-6)
                            ? SlopeModel::BahadurRao
                            : SlopeModel::Plain;

    const bool all_censored = std::all_of(r.cells.begin(), r.cells.end(), [](const TailCell& c) { return c.censored; });
    if (all_censored) {
        if (!certified_impossible(settings.x, settings.side))
            throw UnderpoweredError("tail experiment underpowered: the event was never observed at any n; "
                                    "use smaller n or move x closer to F(u)");
        r.certified_zero = true;
        r.fitted_rate = r.fitted_rate_plain = r.ci_low = r.ci_high = kInf;
        r.pass = std::isinf(theory.value);
        return r;
    }

    r.fitted_rate = *fit_intercept(r.cells, num_paths, r.slope_model);
    r.fitted_rate_plain = *fit_intercept(r.cells, num_paths, SlopeModel::Plain);

    // parametric bootstrap on the binomial counts
    std::vector<double> boot;
    if (settings.bootstrap_replicates > 0) {
        std::mt19937_64 engine(derive_seed(seed, kBootstrapStream));
        boot.reserve(static_cast<std::size_t>(settings.bootstrap_replicates));
        std::vector<TailCell> cells(r.cells.size());
        for (int b = 0; b < settings.bootstrap_replicates; ++b) {
            for (std::size_t i = 0; i < r.cells.size(); ++i) {
                boost::random::binomial_distribution<long> draw(static_cast<long>(num_paths), r.cells[i].phat);
                cells[i] = make_cell(r.cells[i].n, static_cast<std::size_t>(draw(engine)), num_paths);
            }
            if (auto fit = fit_intercept(cells, num_paths, r.slope_model)) boot.push_back(*fit);
        }
    }
    if (boot.size() >= 2) {
        r.ci_low = stats::quantile(boot, 0.025);
        r.ci_high = stats::quantile(boot, 0.975);
    } else {
        r.ci_low = r.ci_high = r.fitted_rate;
    }

    if (std::isinf(theory.value)) {
        r.pass = false;
    } else {
        const double tol = std::max(settings.rel_tolerance * theory.value, settings.abs_tolerance);
        r.pass = std::abs(r.fitted_rate - theory.value) <= tol;
    }
    return r;
}

TailExperimentReport tail_experiment(const ModelSetup& model, const SchemeFamily& family, const TailSettings& settings,
                                     const MonteCarloSettings& mc) {
    check_tail_settings(settings);
    if (mc.num_paths < 10000) throw ParameterError("tail experiment: num_paths must be >= 10000");
    const double f = laplace_value(model.vol, settings.u);
    const double slack = 1e-9;
    if (settings.side == TailSide::Upper ? settings.x < f - slack : settings.x > f + slack)
        throw ParameterError("tail experiment: x must lie on the rare side of F(u) = " + format_double(f));

    const auto theory = legendre_rate(settings.x, settings.u, model.vol, limit_of(family), settings.quadrature,
                                      settings.solver);
    std::vector<std::size_t> counts;
    const double u[1] = {settings.u};
    for (std::size_t n : settings.n_list) {
        std::size_t count = 0;
        if (!certified_impossible(settings.x, settings.side)) {
            const auto values = simulate_estimates(model, family.make(n), u, mc);
            for (double v : values) count += event(v, settings.x, settings.side) ? 1 : 0;
        }
        counts.push_back(count);
    }
    return summarize_tail(settings, counts, mc.num_paths, theory, mc.seed);
}

MdpReport mdp_experiment(const ModelSetup& model, const SchemeFamily& family, const MdpSettings& settings,
                         const MonteCarloSettings& mc) {
    if (settings.u == 0.0)
        throw DomainError("mdp experiment: u = 0 is degenerate (V_n(0) = 1 for every path)");
    if (!(settings.u > 0.0) || !std::isfinite(settings.u)) throw DomainError("mdp experiment: u must be positive");
    const double gamma_cap = family.irregular ? 0.25 : 0.5;
    if (!(settings.gamma > 0.0 && settings.gamma < gamma_cap))
        throw ParameterError("mdp experiment: gamma must lie in (0, " + format_double(gamma_cap) + ") for " +
                             (family.irregular ? "irregular" : "regular") + " sampling");
    if (settings.n < 2) throw ParameterError("mdp experiment: n must be >= 2");
    if (mc.num_paths < 2) throw ParameterError("mdp experiment: num_paths must be >= 2");
    settings.quadrature.validate();

    MdpReport r;
    r.u = settings.u;
    r.gamma = settings.gamma;
    r.n = settings.n;
    r.num_paths = mc.num_paths;
    r.variance_tolerance = settings.variance_tolerance;
    r.normality_level = settings.normality_level;
    const double n = static_cast<double>(settings.n);
    r.m_n = std::pow(n, settings.gamma);

    const double f = laplace_value(model.vol, settings.u);
    const double u[1] = {settings.u};
    auto values = simulate_estimates(model, family.make(settings.n), u, mc);
    std::vector<double> scaled(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) scaled[i] = r.m_n * (values[i] - f);

    r.sample_variance = stats::variance(scaled);
    r.scaled_variance = r.sample_variance * n / (r.m_n * r.m_n);
    r.theory_variance = clt_covariance(settings.u, settings.u, model.vol, limit_of(family), settings.quadrature);
    r.relative_error = std::abs(r.scaled_variance - r.theory_variance) / r.theory_variance;

    std::vector<double> z(values.size());
    const double sd = std::sqrt(r.theory_variance);
    for (std::size_t i = 0; i < values.size(); ++i) z[i] = std::sqrt(n) * (values[i] - f) / sd;
    const auto ks = stats::ks_standard_normal(std::move(z));
    r.ks_statistic = ks.statistic;
    r.normality_p_value = ks.p_value;

    r.tail_x = settings.tail_x;
    const auto hits = std::count_if(scaled.begin(), scaled.end(), [&](double y) { return y > settings.tail_x; });
    r.tail_phat = static_cast<double>(hits) / static_cast<double>(scaled.size());
    const double s_n = r.m_n * r.m_n / n;
    r.tail_log_rate = hits == 0 ? kInf : -s_n * std::log(r.tail_phat);
    r.tail_theory_rate = mdp_rate(settings.tail_x, settings.u, model.vol, limit_of(family), settings.quadrature).value;

    r.pass = r.relative_error <= settings.variance_tolerance && r.normality_p_value >= settings.normality_level;
    return r;
}

Figure1Settings Figure1Settings::paper_defaults() {
    Figure1Settings s;
    for (int i = 0; i <= 400; ++i) s.lambda_grid.push_back((i - 200) / 20.0);
    for (int i = 0; i <= 40; ++i) s.x_grid.push_back((i - 20) / 20.0);
    s.u = 1.0;
    return s;
}

Figure1Data figure1_data(const VolatilityPath& vol, const Figure1Settings& settings) {
    if (settings.lambda_grid.empty() || settings.x_grid.empty())
        throw ParameterError("figure1: lambda and x grids must not be empty");
    if (settings.lambda_max_values.empty()) throw ParameterError("figure1: at least one lambda_max is required");
    if (!(settings.u >= 0.0)) throw DomainError("figure1: u must be >= 0");
    settings.quadrature.validate();

    Figure1Data d;
    d.curve_count = settings.x_grid.size();
    std::vector<double> lam(settings.lambda_grid.size());
    for (std::size_t j = 0; j < lam.size(); ++j)
        lam[j] = lambda_point(settings.lambda_grid[j], settings.u, vol, nullptr, settings.quadrature);
    double window = 0.0;
    for (double l : settings.lambda_grid) window = std::max(window, std::abs(l));

    d.objective.header = {"x", "lambda", "objective"};
    for (double x : settings.x_grid) {
        double best = -kInf;
        for (std::size_t j = 0; j < lam.size(); ++j) {
            const double obj = settings.lambda_grid[j] * x - lam[j];
            best = std::max(best, obj);
            d.objective.add_row({fmt(x), fmt(settings.lambda_grid[j]), fmt(obj)});
        }
        d.grid_max.push_back(best);
    }

    std::vector<double> lmax = settings.lambda_max_values;
    std::sort(lmax.begin(), lmax.end());
    d.rates.header = {"x", "I", "status", "lambda_max"};
    std::vector<std::vector<RateFunctionResult>> by_cap(lmax.size());
    for (std::size_t c = 0; c < lmax.size(); ++c) {
        LegendreSolver solver;
        solver.lambda_max = lmax[c];
        Figure1Boundary b{lmax[c], -kInf, kInf};
        for (double x : settings.x_grid) {
            const auto res = legendre_rate(x, settings.u, vol, nullptr, settings.quadrature, solver);
            by_cap[c].push_back(res);
            d.rates.add_row({fmt(x), fmt(res.value), to_string(res.status), fmt(lmax[c])});
            if (res.status == RateStatus::Converged) {
                b.upper_x = std::max(b.upper_x, x);
                b.lower_x = std::min(b.lower_x, x);
            }
        }
        d.boundaries.push_back(b);
    }

    const auto& widest = by_cap.back();
    for (std::size_t i = 0; i < settings.x_grid.size(); ++i) {
        const auto& res = widest[i];
        d.solver_rate.push_back(res.value);
        const bool inside = res.status == RateStatus::Converged && std::abs(res.lambda_star) <= window;
        d.compared.push_back(inside);
        if (inside) d.max_discrepancy = std::max(d.max_discrepancy, std::abs(d.grid_max[i] - res.value));
    }
    d.pass = d.max_discrepancy <= settings.match_tolerance;
    return d;
}

CurveReport curve_experiment(const ModelSetup& model, const SchemeFamily& family, const CurveSettings& settings,
                             const MonteCarloSettings& mc) {
    if (settings.u_grid.empty()) throw ParameterError("curve experiment: u grid must not be empty");
    if (settings.n_list.empty()) throw ParameterError("curve experiment: n_list must not be empty");
    if (mc.num_paths < 2) throw ParameterError("curve experiment: num_paths must be >= 2");
    for (std::size_t i = 1; i < settings.n_list.size(); ++i)
        if (settings.n_list[i] <= settings.n_list[i - 1])
            throw ParameterError("curve experiment: n_list must be strictly increasing");
    settings.quadrature.validate();

    CurveReport r;
    r.u_grid = settings.u_grid;
    r.num_paths = mc.num_paths;
    r.n = settings.n_list.back();
    r.z_tolerance = settings.z_tolerance;
    const std::size_t k = r.u_grid.size();
    const auto f = laplace_curve(model.vol, r.u_grid);
    const TimeChange* tprime = limit_of(family);
    r.theory_cov = clt_covariance_matrix(r.u_grid, model.vol, tprime, settings.quadrature);

    std::vector<std::vector<std::size_t>> counts(k);
    std::vector<double> targets(k);
    if (settings.tail_offset)
        for (std::size_t j = 0; j < k; ++j) targets[j] = f[j] + *settings.tail_offset;

    const std::size_t N = mc.num_paths;
    std::vector<double> last;
    for (std::size_t n : settings.n_list) {
        auto values = simulate_estimates(model, family.make(n), r.u_grid, mc);
        for (double v : values) r.sup_norm = std::max(r.sup_norm, std::abs(v));
        if (settings.tail_offset)
            for (std::size_t j = 0; j < k; ++j) {
                const TailSide side = *settings.tail_offset >= 0.0 ? TailSide::Upper : TailSide::Lower;
                std::size_t c = 0;
                for (std::size_t p = 0; p < N; ++p) c += event(values[p * k + j], targets[j], side) ? 1 : 0;
                counts[j].push_back(c);
            }
        last = std::move(values);
    }

    // centered fluctuations at the largest n
    const double rn = std::sqrt(static_cast<double>(r.n));
    std::vector<double> y(N * k);
    for (std::size_t p = 0; p < N; ++p)
        for (std::size_t j = 0; j < k; ++j) y[p * k + j] = rn * (last[p * k + j] - f[j]);
    std::vector<double> means(k);
    for (std::size_t j = 0; j < k; ++j)
        means[j] = pairwise_sum(0, N, [&](std::size_t p) { return y[p * k + j]; }) / static_cast<double>(N);

    r.empirical_cov.assign(k * k, 0.0);
    r.std_error.assign(k * k, 0.0);
    r.z_score.assign(k * k, 0.0);
    const double dN = static_cast<double>(N);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            auto prod = [&](std::size_t p) { return (y[p * k + a] - means[a]) * (y[p * k + b] - means[b]); };
            const double cov = pairwise_sum(0, N, prod) / (dN - 1.0);
            const double m = cov * (dN - 1.0) / dN;
            const double ss = pairwise_sum(0, N, [&](std::size_t p) {
                const double e = prod(p) - m;
                return e * e;
            });
            const double se = std::sqrt(ss / (dN - 1.0) / dN);
            const double diff = cov - r.theory_cov[a * k + b];
            double z = 0.0;
            if (se > 0.0) z = diff / se;
            else if (diff != 0.0) z = kInf;
            for (auto [i, j] : {std::pair{a, b}, std::pair{b, a}}) {
                r.empirical_cov[i * k + j] = cov;
                r.std_error[i * k + j] = se;
                r.z_score[i * k + j] = z;
            }
            r.max_abs_z = std::max(r.max_abs_z, std::abs(z));
        }
    }

    if (settings.tail_offset) {
        for (std::size_t j = 0; j < k; ++j) {
            TailSettings ts = settings.tail;
            ts.u = r.u_grid[j];
            ts.x = targets[j];
            ts.side = *settings.tail_offset >= 0.0 ? TailSide::Upper : TailSide::Lower;
            ts.n_list = settings.n_list;
            ts.quadrature = settings.quadrature;
            const auto theory = legendre_rate(ts.x, ts.u, model.vol, tprime, ts.quadrature, ts.solver);
            r.tails.push_back(summarize_tail(ts, counts[j], N, theory, derive_seed(mc.seed, j)));
        }
    }

    r.pass = r.max_abs_z <= settings.z_tolerance && r.sup_norm <= 1.0;
    for (const auto& t : r.tails) r.pass = r.pass && t.pass;
    return r;
}

CsvTable to_csv(const TailExperimentReport& r) {
    CsvTable t;
    t.header = {"u", "x", "side", "n", "num_paths", "count", "phat", "std_error", "log_slope", "censored"};
    for (const auto& c : r.cells)
        t.add_row({fmt(r.u), fmt(r.x), to_string(r.side), fmt(c.n), fmt(r.num_paths), fmt(c.count), fmt(c.phat),
                   fmt(c.std_error), fmt(c.log_slope), c.censored ? "1" : "0"});
    return t;
}

CsvTable to_csv(const MdpReport& r) {
    CsvTable t;
    t.header = {"u",           "gamma",          "n",               "m_n",          "num_paths",
                "sample_variance", "scaled_variance", "theory_variance", "relative_error", "ks_statistic",
                "normality_p_value", "tail_x",    "tail_phat",       "tail_log_rate", "tail_theory_rate",
                "verdict"};
    t.add_row({fmt(r.u), fmt(r.gamma), fmt(r.n), fmt(r.m_n), fmt(r.num_paths), fmt(r.sample_variance),
               fmt(r.scaled_variance), fmt(r.theory_variance), fmt(r.relative_error), fmt(r.ks_statistic),
               fmt(r.normality_p_value), fmt(r.tail_x), fmt(r.tail_phat), fmt(r.tail_log_rate),
               fmt(r.tail_theory_rate), r.pass ? "pass" : "fail"});
    return t;
}

CsvTable to_csv(const CurveReport& r) {
    CsvTable t;
    t.header = {"u_i", "u_j", "empirical_cov", "theory_cov", "std_error", "z"};
    const std::size_t k = r.u_grid.size();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            t.add_row({fmt(r.u_grid[i]), fmt(r.u_grid[j]), fmt(r.empirical_cov[i * k + j]),
                       fmt(r.theory_cov[i * k + j]), fmt(r.std_error[i * k + j]), fmt(r.z_score[i * k + j])});
    return t;
}

std::string summary(const TailExperimentReport& r) {
    std::ostringstream os;
    os << "tail experiment: u=" << fmt(r.u) << " x=" << fmt(r.x) << " side=" << to_string(r.side)
       << " num_paths=" << r.num_paths << '\n';
    for (const auto& c : r.cells)
        os << "  n=" << c.n << " phat=" << fmt(c.phat) << " se=" << fmt(c.std_error)
           << (c.censored ? " log_slope>=" : " log_slope=") << fmt(c.log_slope) << '\n';
    os << "  slope model: " << to_string(r.slope_model) << '\n';
    os << "  fitted rate: " << fmt(r.fitted_rate) << " [" << fmt(r.ci_low) << ", " << fmt(r.ci_high) << "]"
       << " (plain fit " << fmt(r.fitted_rate_plain) << ")\n";
    os << "  theory rate: " << fmt(r.theory.value) << " status=" << to_string(r.theory.status)
       << " lambda*=" << fmt(r.theory.lambda_star) << '\n';
    if (r.certified_zero) os << "  event impossible: |V_n(u)| <= 1, P = 0 for every n\n";
    os << "  verdict: " << (r.pass ? "pass" : "fail") << '\n';
    return os.str();
}

std::string summary(const MdpReport& r) {
    std::ostringstream os;
    os << "mdp experiment: u=" << fmt(r.u) << " gamma=" << fmt(r.gamma) << " n=" << r.n << " m_n=" << fmt(r.m_n)
       << " num_paths=" << r.num_paths << '\n';
    os << "  variance: " << fmt(r.scaled_variance) << " theory " << fmt(r.theory_variance) << " rel.err "
       << fmt(r.relative_error) << " (tol " << fmt(r.variance_tolerance) << ")\n";
    os << "  KS: D=" << fmt(r.ks_statistic) << " p=" << fmt(r.normality_p_value) << " (level "
       << fmt(r.normality_level) << ")\n";
    os << "  tail at x=" << fmt(r.tail_x) << ": phat=" << fmt(r.tail_phat) << " -s_n log p=" << fmt(r.tail_log_rate)
       << " mdp rate " << fmt(r.tail_theory_rate) << '\n';
    os << "  verdict: " << (r.pass ? "pass" : "fail") << '\n';
    return os.str();
}

std::string summary(const CurveReport& r) {
    std::ostringstream os;
    os << "curve experiment: n=" << r.n << " num_paths=" << r.num_paths << " grid size=" << r.u_grid.size() << '\n';
    os << "  max |z| = " << fmt(r.max_abs_z) << " (tol " << fmt(r.z_tolerance) << ")\n";
    os << "  sup norm = " << fmt(r.sup_norm) << '\n';
    for (const auto& t : r.tails) os << summary(t);
    os << "  verdict: " << (r.pass ? "pass" : "fail") << '\n';
    return os.str();
}

std::string summary(const Figure1Data& d) {
    std::ostringstream os;
    os << "figure1: " << d.curve_count << " curves\n";
    os << "  max |grid sup - solver rate| over compared x: " << fmt(d.max_discrepancy) << '\n';
    for (const auto& b : d.boundaries)
        os << "  lambda_max=" << fmt(b.lambda_max) << ": finite rate found for x in [" << fmt(b.lower_x) << ", "
           << fmt(b.upper_x) << "]\n";
    os << "  verdict: " << (d.pass ? "pass" : "fail") << '\n';
    return os.str();
}

}  // namespace erltv

#include "erltv/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <tuple>

#include <boost/random/normal_distribution.hpp>

#include "erltv/numeric.hpp"

namespace erltv {

namespace {

double interpolate_uniform(const std::vector<double>& values, double s) {
    const std::size_t cells = values.size() - 1;
    const double pos = std::clamp(s, 0.0, 1.0) * static_cast<double>(cells);
    const std::size_t k = std::min(static_cast<std::size_t>(pos), cells - 1);
    const double frac = pos - static_cast<double>(k);
    return values[k] + frac * (values[k + 1] - values[k]);
}

void require_unit_time(double s, const char* what) {
    if (!(s >= 0.0 && s <= 1.0)) {
        std::ostringstream msg;
        msg << what << ": time " << s << " outside [0, 1]";
        throw DomainError(msg.str());
    }
}

}  // namespace

std::string to_string(ContinuityClass c) {
    switch (c) {
        case ContinuityClass::UniformlyContinuous: return "uniformly-continuous";
        case ContinuityClass::HalfHolder: return "half-holder";
        case ContinuityClass::Lipschitz: return "lipschitz";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// VolatilityPath

VolatilityPath VolatilityPath::constant(double sigma0) {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
        throw ParameterError("constant volatility must be positive and finite");
    VolatilityPath p;
    p.kind_ = Kind::Constant;
    p.sigma0_ = sigma0;
    p.sigma_min_ = sigma0;
    return p;
}

VolatilityPath VolatilityPath::analytic(std::function<double(double)> fn, double sigma_min) {
    if (!(sigma_min > 0.0)) throw ParameterError("sigma_min must be positive");
    VolatilityPath p;
    p.kind_ = Kind::Analytic;
    p.fn_ = std::move(fn);
    p.sigma_min_ = sigma_min;
    return p;
}

VolatilityPath VolatilityPath::tabulated(std::vector<double> values) {
    if (values.size() < 2) throw ParameterError("tabulated volatility needs at least two nodes");
    const double lo = *std::min_element(values.begin(), values.end());
    if (!(lo > 0.0)) throw ParameterError("tabulated volatility must be positive");
    VolatilityPath p;
    p.kind_ = Kind::Tabulated;
    p.sigma_min_ = lo;
    p.grid_ = std::make_shared<const std::vector<double>>(std::move(values));
    return p;
}

double VolatilityPath::operator()(double s) const {
    switch (kind_) {
        case Kind::Constant: return sigma0_;
        case Kind::Analytic: return fn_(s);
        case Kind::Tabulated: return interpolate_uniform(*grid_, s);
    }
    return sigma0_;
}

// ---------------------------------------------------------------------------
// VolatilityModel

VolatilityModel::VolatilityModel(Spec spec, double sigma_min)
    : spec_(std::move(spec)), sigma_min_(sigma_min) {
    if (!(sigma_min_ > 0.0) || !std::isfinite(sigma_min_))
        throw ParameterError("sigma_min must be positive (volatility is bounded away from zero)");
}

VolatilityModel VolatilityModel::constant(double sigma0, std::optional<double> sigma_min) {
    const double lo = sigma_min.value_or(sigma0);
    if (!(sigma0 >= lo)) throw ParameterError("constant volatility below sigma_min");
    return VolatilityModel(ConstantVol{sigma0}, lo);
}

VolatilityModel VolatilityModel::sinusoid(double sigma0, double amplitude, double frequency,
                                          std::optional<double> sigma_min) {
    const double lo = sigma_min.value_or(sigma0 - std::abs(amplitude));
    if (!(sigma0 - std::abs(amplitude) >= lo) || !(lo > 0.0))
        throw ParameterError("sinusoid volatility requires sigma0 - |amplitude| >= sigma_min > 0");
    return VolatilityModel(SinusoidVol{sigma0, amplitude, frequency}, lo);
}

VolatilityModel VolatilityModel::piecewise_grid(std::vector<double> values,
                                                std::optional<double> sigma_min) {
    if (values.size() < 2) throw ParameterError("piecewise-grid volatility needs at least two nodes");
    const double smallest = *std::min_element(values.begin(), values.end());
    const double lo = sigma_min.value_or(smallest);
    if (!(smallest >= lo)) throw ParameterError("piecewise-grid volatility below sigma_min");
    return VolatilityModel(PiecewiseGridVol{std::move(values)}, lo);
}

VolatilityModel VolatilityModel::cir_like(double kappa, double theta, double eta, double sigma_min) {
    if (!(kappa >= 0.0) || !(theta > 0.0) || !(eta >= 0.0))
        throw ParameterError("cir-like volatility requires kappa >= 0, theta > 0, eta >= 0");
    if (!(theta >= sigma_min)) throw ParameterError("cir-like initial value theta below sigma_min");
    return VolatilityModel(CirVol{kappa, theta, eta}, sigma_min);
}

ContinuityClass VolatilityModel::continuity_class() const {
    return is_stochastic() ? ContinuityClass::HalfHolder : ContinuityClass::Lipschitz;
}

VolatilityPath VolatilityModel::realize(std::optional<std::uint64_t> path_seed) const {
    return std::visit(
        [&](const auto& m) -> VolatilityPath {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantVol>) {
                return VolatilityPath::constant(m.sigma0);
            } else if constexpr (std::is_same_v<T, SinusoidVol>) {
                const SinusoidVol p = m;
                return VolatilityPath::analytic(
                    [p](double s) { return p.sigma0 + p.amplitude * std::sin(p.frequency * s); },
                    sigma_min_);
            } else if constexpr (std::is_same_v<T, PiecewiseGridVol>) {
                return VolatilityPath::tabulated(m.values);
            } else {
                if (!path_seed) throw ParameterError("stochastic volatility requires a path seed");
                std::mt19937_64 engine(derive_seed(*path_seed, 0x5167));
                boost::random::normal_distribution<double> normal;
                const double dt = 1.0 / static_cast<double>(kSigmaPathCells);
                const double sqdt = std::sqrt(dt);
                std::vector<double> values(kSigmaPathCells + 1);
                double sigma = m.theta;
                values[0] = sigma;
                for (std::size_t k = 1; k <= kSigmaPathCells; ++k) {
                    sigma += m.kappa * (m.theta - sigma) * dt + m.eta * std::sqrt(sigma) * sqdt * normal(engine);
                    sigma = std::max(sigma, sigma_min_);
                    values[k] = sigma;
                }
                return VolatilityPath::tabulated(std::move(values));
            }
        },
        spec_);
}

double eval_sigma(const VolatilityModel& model, double s, std::optional<std::uint64_t> path_seed) {
    require_unit_time(s, "eval_sigma");
    if (!model.is_stochastic()) return model.realize()(s);
    if (!path_seed) throw ParameterError("stochastic volatility requires a path seed");

    using Key = std::tuple<double, double, double, double, std::uint64_t>;
    static std::mutex mutex;
    static std::map<Key, VolatilityPath> cache;
    const auto& cir = std::get<CirVol>(model.spec());
    const Key key{cir.kappa, cir.theta, cir.eta, model.sigma_min(), *path_seed};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second(s);
    }
    VolatilityPath path = model.realize(path_seed);
    const double value = path(s);
    std::lock_guard lock(mutex);
    if (cache.size() >= 64) cache.clear();
    cache.emplace(key, std::move(path));
    return value;
}

std::vector<double> laplace_curve(const VolatilityPath& path, std::span<const double> u_grid, int steps) {
    if (steps < 1) throw ParameterError("laplace_curve: steps must be >= 1");
    std::vector<double> out;
    out.reserve(u_grid.size());
    std::vector<double> sigma2;
    if (!path.is_constant()) {
        sigma2.resize(static_cast<std::size_t>(steps));
        for (int k = 0; k < steps; ++k) {
            const double v = path((k + 0.5) / steps);
            sigma2[static_cast<std::size_t>(k)] = v * v;
        }
    }
    for (double u : u_grid) {
        if (!(u >= 0.0)) throw DomainError("laplace_curve: u must be nonnegative");
        if (u == 0.0) {
            out.push_back(1.0);
        } else if (path.is_constant()) {
            const double s0 = path.constant_value();
            out.push_back(std::exp(-u * s0 * s0));
        } else {
            const double total = pairwise_sum(0, sigma2.size(), [&](std::size_t k) { return std::exp(-u * sigma2[k]); });
            out.push_back(total / steps);
        }
    }
    return out;
}

double laplace_value(const VolatilityPath& path, double u, int steps) {
    const double grid[1] = {u};
    return laplace_curve(path, grid, steps).front();
}

// ---------------------------------------------------------------------------
// Drift and jumps

DriftSpec DriftSpec::constant(double a0) {
    DriftSpec d;
    d.spec_ = ConstantDrift{a0};
    d.bound_ = std::abs(a0);
    return d;
}

DriftSpec DriftSpec::on_grid(std::vector<double> values) {
    if (values.size() < 2) throw ParameterError("grid drift needs at least two nodes");
    DriftSpec d;
    double bound = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw ParameterError("grid drift values must be finite");
        bound = std::max(bound, std::abs(v));
    }
    d.spec_ = GridDrift{std::move(values)};
    d.bound_ = bound;
    return d;
}

double DriftSpec::operator()(double s) const {
    if (const auto* c = std::get_if<ConstantDrift>(&spec_)) return c->a0;
    if (const auto* g = std::get_if<GridDrift>(&spec_)) return interpolate_uniform(g->values, s);
    return 0.0;
}

JumpSpec JumpSpec::compound_poisson(double intensity_per_unit_time, JumpSizeSampler sizes) {
    if (!(intensity_per_unit_time >= 0.0) || !std::isfinite(intensity_per_unit_time))
        throw ParameterError("compound-poisson intensity must be finite and nonnegative");
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, NormalJumpSize>) {
                if (!(s.stddev >= 0.0) || !std::isfinite(s.mean))
                    throw ParameterError("normal jump sizes need finite mean and stddev >= 0");
            } else {
                if (!(s.mean_abs >= 0.0) || !std::isfinite(s.mean_abs))
                    throw ParameterError("laplace jump sizes need a finite mean absolute size");
            }
        },
        sizes);
    JumpSpec j;
    j.spec_ = CompoundPoissonJumps{intensity_per_unit_time, sizes};
    return j;
}

JumpSpec JumpSpec::truncated_stable(double beta, double scale, double epsilon) {
    if (!(beta >= 0.0 && beta < 1.0))
        throw ParameterError(
            "truncated-stable jumps need Blumenthal-Getoor index beta in [0, 1): "
            "the jump part must have finite variation");
    if (!(scale >= 0.0)) throw ParameterError("truncated-stable scale must be nonnegative");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("truncation level must lie in (0, 1)");
    JumpSpec j;
    j.spec_ = TruncatedStableJumps{beta, scale, epsilon};
    return j;
}

double JumpSpec::beta() const {
    if (const auto* t = std::get_if<TruncatedStableJumps>(&spec_)) return t->beta;
    return 0.0;
}

double JumpSpec::intensity() const {
    if (const auto* c = std::get_if<CompoundPoissonJumps>(&spec_)) return c->intensity_per_unit_time;
    if (const auto* t = std::get_if<TruncatedStableJumps>(&spec_)) {
        // Mass of scale |x|^{-1-beta} on epsilon <= |x| <= 1, both signs.
        if (t->scale == 0.0) return 0.0;
        if (t->beta == 0.0) return 2.0 * t->scale * std::log(1.0 / t->epsilon);
        return 2.0 * t->scale * (std::pow(t->epsilon, -t->beta) - 1.0) / t->beta;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Sampling schemes

SamplingScheme SamplingScheme::regular(std::size_t n) {
    if (n == 0) throw SchemeError("regular scheme needs n >= 1");
    SamplingScheme s;
    s.regular_ = true;
    s.n_ = n;
    auto times = std::make_shared<std::vector<double>>(n + 1);
    for (std::size_t i = 0; i <= n; ++i) (*times)[i] = static_cast<double>(i) / static_cast<double>(n);
    s.times_ = std::move(times);
    s.gaps_.assign(n, 1.0 / static_cast<double>(n));
    return s;
}

SamplingScheme SamplingScheme::irregular(std::vector<double> times, std::size_t n) {
    if (times.size() < 2) throw SchemeError("irregular scheme needs at least two observation times");
    if (times.front() != 0.0) throw SchemeError("sampling scheme violates t_{n,0} = 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            std::ostringstream msg;
            msg << "sampling scheme violates strict monotonicity t_{n,i-1} < t_{n,i} at i = " << i;
            throw SchemeError(msg.str());
        }
    }
    if (!(times.back() <= 1.0)) throw SchemeError("sampling scheme violates t_{n,N} <= 1");
    const std::size_t big_n = times.size() - 1;
    if (big_n > n) throw SchemeError("sampling scheme violates N_n <= n");

    bool on_regular_grid = big_n == n;
    for (std::size_t i = 0; on_regular_grid && i <= n; ++i)
        on_regular_grid = times[i] == static_cast<double>(i) / static_cast<double>(n);
    if (on_regular_grid) return regular(n);

    SamplingScheme s;
    s.regular_ = false;
    s.n_ = n;
    s.gaps_.resize(big_n);
    for (std::size_t i = 1; i <= big_n; ++i) s.gaps_[i - 1] = times[i] - times[i - 1];
    s.times_ = std::make_shared<const std::vector<double>>(std::move(times));
    return s;
}

SamplingScheme SamplingScheme::quantile(std::size_t n, const std::function<double(double)>& inverse_T) {
    if (n == 0) throw SchemeError("quantile scheme needs n >= 1");
    std::vector<double> times(n + 1);
    times[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) times[i] = inverse_T(static_cast<double>(i) / static_cast<double>(n));
    return irregular(std::move(times), n);
}

SchemeDiagnostics SamplingScheme::diagnostics() const {
    const double n = static_cast<double>(n_);
    const double max_gap = *std::max_element(gaps_.begin(), gaps_.end());
    const double sum_sq = pairwise_sum(0, gaps_.size(), [&](std::size_t i) { return gaps_[i] * gaps_[i]; });
    return {std::sqrt(n) * max_gap, n * sum_sq};
}

BuiltScheme build_scheme(std::size_t n) {
    auto s = SamplingScheme::regular(n);
    auto d = s.diagnostics();
    return {std::move(s), d};
}

BuiltScheme build_scheme(std::vector<double> times, std::size_t n) {
    auto s = SamplingScheme::irregular(std::move(times), n);
    auto d = s.diagnostics();
    return {std::move(s), d};
}

std::vector<double> read_times_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open times file: " + path);
    std::vector<double> times;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        double t = 0.0;
        if (!(fields >> t)) throw ParameterError("malformed line in times file: " + line);
        times.push_back(t);
    }
    return times;
}

DiagnosticTrend diagnostic_trend(std::span<const std::size_t> n_values,
                                 const std::function<SamplingScheme(std::size_t)>& family,
                                 double growth_tolerance) {
    DiagnosticTrend trend;
    trend.n_values.assign(n_values.begin(), n_values.end());
    for (std::size_t n : n_values) trend.diagnostics.push_back(family(n).diagnostics());
    trend.max_gap_vanishing = trend.diagnostics.size() >= 2;
    trend.sum_squares_bounded = trend.diagnostics.size() >= 2;
    for (std::size_t k = 1; k < trend.diagnostics.size(); ++k) {
        const auto& prev = trend.diagnostics[k - 1];
        const auto& cur = trend.diagnostics[k];
        if (!(cur.sqrt_n_max_gap < prev.sqrt_n_max_gap)) trend.max_gap_vanishing = false;
        if (cur.n_sum_squared_gaps > prev.n_sum_squared_gaps * (1.0 + growth_tolerance))
            trend.sum_squares_bounded = false;
    }
    return trend;
}

// ---------------------------------------------------------------------------
// Time change

TimeChangeValue time_change(const SamplingScheme& scheme, double s) {
    require_unit_time(s, "time_change");
    const auto times = scheme.times();
    const auto gaps = scheme.gaps();
    const double n = static_cast<double>(scheme.n());
    const std::size_t big_n = scheme.size();
    if (s > times.back()) return {static_cast<double>(big_n) / n, 0.0, true};

    // Interval [t_{i-1}, t_i) containing s; the last interval is closed on the right.
    auto it = std::upper_bound(times.begin(), times.end(), s);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i > big_n) i = big_n;
    const double gap = gaps[i - 1];
    const double value = (static_cast<double>(i - 1) + (s - times[i - 1]) / gap) / n;
    return {value, 1.0 / (n * gap), false};
}

TimeChange TimeChange::identity() {
    TimeChange t;
    t.identity_ = true;
    t.density_ = [](double) { return 1.0; };
    t.cumulative_ = [](double s) { return s; };
    return t;
}

TimeChange TimeChange::constant(double density) {
    if (!(density > 0.0) || !std::isfinite(density)) throw ParameterError("time-change density must be positive");
    if (density == 1.0) return identity();
    TimeChange t;
    t.density_ = [density](double) { return density; };
    t.cumulative_ = [density](double s) { return density * s; };
    return t;
}

TimeChange TimeChange::power(double p) {
    if (!(p > 0.0)) throw ParameterError("power time change needs p > 0");
    if (p == 1.0) return identity();
    TimeChange t;
    t.density_ = [p](double s) { return p * std::pow(s, p - 1.0); };
    t.cumulative_ = [p](double s) { return std::pow(s, p); };
    return t;
}

TimeChange TimeChange::from_density(std::function<double(double)> density, int panels) {
    if (panels < 1) throw ParameterError("time-change integration needs panels >= 1");
    auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(panels) + 1, 0.0);
    const double h = 1.0 / panels;
    for (int k = 0; k < panels; ++k)
        (*table)[static_cast<std::size_t>(k) + 1] = (*table)[static_cast<std::size_t>(k)] + h * density((k + 0.5) * h);
    TimeChange t;
    t.density_ = density;
    t.cumulative_ = [table, density, panels, h](double s) {
        const double pos = std::clamp(s, 0.0, 1.0) * panels;
        const int k = std::min(static_cast<int>(pos), panels - 1);
        const double left = k * h;
        const double part = std::clamp(s, 0.0, 1.0) - left;
        return (*table)[static_cast<std::size_t>(k)] + (part > 0.0 ? part * density(left + 0.5 * part) : 0.0);
    };
    return t;
}

TimeChange TimeChange::from_scheme(const SamplingScheme& scheme) {
    if (scheme.is_regular()) return identity();
    TimeChange t;
    t.density_ = [scheme](double s) { return time_change(scheme, std::clamp(s, 0.0, 1.0)).derivative; };
    t.cumulative_ = [scheme](double s) { return time_change(scheme, std::clamp(s, 0.0, 1.0)).value; };
    return t;
}

double TimeChange::cumulative(double s) const {
    require_unit_time(s, "TimeChange::cumulative");
    return cumulative_(s);
}

bool TimeChange::density_positive_on(int panels) const {
    for (int k = 0; k < panels; ++k) {
        const double v = density_((k + 0.5) / panels);
        if (!(v > 0.0) || !std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace erltv

#include "erltv/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "erltv/estimator.hpp"
#include "erltv/io.hpp"
#include "erltv/numeric.hpp"
#include "erltv/simulator.hpp"

namespace erltv::cli {

namespace {

namespace fs = std::filesystem;

class Artifacts {
public:
    explicit Artifacts(const ExperimentConfig& c) : config_(c), dir_(c.output_root()) {
        fs::create_directories(dir_);
    }

    std::string path(const std::string& name) const { return (dir_ / (config_.output_prefix + "_" + name)).string(); }

    void table(const std::string& name, CsvTable t, const std::vector<std::string>& extra = {}) const {
        auto comments = config_.header_comments();
        comments.insert(comments.end(), extra.begin(), extra.end());
        comments.insert(comments.end(), t.comments.begin(), t.comments.end());
        t.comments = std::move(comments);
        t.write(path(name));
    }

    void text(const std::string& name, const std::string& body) const {
        std::ofstream f(path(name), std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path(name));
        for (const auto& c : config_.header_comments()) f << "# " << c << '\n';
        f << body;
    }

private:
    const ExperimentConfig& config_;
    fs::path dir_;
};

const TimeChange* limit_or_null(const SchemeFamily& f) { return f.irregular ? &f.limit : nullptr; }

std::string fmt(double v) { return format_double(v); }

int finish(const Artifacts& a, const std::string& summary_text, bool pass, std::ostream& out) {
    a.text("summary.txt", summary_text);
    out << summary_text;
    return pass ? Pass : Fail;
}

std::uint64_t first_path_seed(const ExperimentConfig& c, std::size_t n) {
    return derive_seed(derive_seed(c.seed, n), 0);
}

int run_simulate(const ExperimentConfig& c, const Artifacts& a, std::ostream& out) {
    const auto family = c.scheme_family();
    const auto model = c.model_setup();
    std::ostringstream s;
    s << "simulate: one path per n, continuity class " << to_string(c.volatility.continuity_class()) << '\n';
    for (std::size_t n : c.n_list) {
        const IncrementSimulator sim(model.vol, model.drift, model.jumps, family.make(n), model.substeps);
        auto p = sim.simulate(first_path_seed(c, n));
        if (c.volatility.is_stochastic()) p.sigma_seed = c.seed;
        const auto name = "increments_n" + std::to_string(n) + ".csv";
        write_increments_csv(a.path(name), p, c.header_comments());
        s << "  n=" << n << " increments=" << p.dx.size() << " file=" << name << '\n';
    }
    return finish(a, s.str(), true, out);
}

int run_estimate(const ExperimentConfig& c, const Artifacts& a, std::ostream& out) {
    CsvTable t;
    t.header = {"n", "u", "v_n"};
    std::ostringstream s;
    s << "estimate: source=" << (c.source == IncrementSource::Zeros ? "zeros"
                                 : c.source == IncrementSource::File ? "file"
                                                                     : "simulate")
      << '\n';
    const auto family = c.scheme_family();
    const auto model = c.model_setup();
    for (std::size_t n : c.n_list) {
        const PathIncrements p = [&] {
            if (c.source == IncrementSource::File) return read_increments_csv(c.increments_file, n);
            const auto scheme = family.make(n);
            if (c.source == IncrementSource::Zeros)
                return PathIncrements{scheme, std::vector<double>(scheme.size(), 0.0), 0, std::nullopt};
            const IncrementSimulator sim(model.vol, model.drift, model.jumps, scheme, model.substeps);
            return sim.simulate(first_path_seed(c, n));
        }();
        const auto curve = erltv_curve(p, c.u_grid);
        for (std::size_t j = 0; j < curve.u_grid.size(); ++j)
            t.add_row({std::to_string(n), fmt(curve.u_grid[j]), fmt(curve.values[j])});
        s << "  n=" << n << " observations=" << p.dx.size() << " V_n(u_min)=" << fmt(curve.values.front())
          << " V_n(u_max)=" << fmt(curve.values.back()) << '\n';
    }
    a.table("estimate.csv", std::move(t));
    return finish(a, s.str(), true, out);
}

int run_rate(const ExperimentConfig& c, const Artifacts& a, std::ostream& out) {
    const auto vol = c.volatility_path();
    const auto family = c.scheme_family();
    CsvTable t;
    t.header = {"x", "u", "lambda_star", "I", "status"};
    std::ostringstream s;
    s << "rate: " << c.x_values.size() * c.u_values.size() << " evaluations\n";
    for (double u : c.u_values)
        for (double x : c.x_values) {
            const auto r = legendre_rate(x, u, vol, limit_or_null(family), c.quadrature, c.solver);
            t.add_row({fmt(x), fmt(u), fmt(r.lambda_star), fmt(r.value), to_string(r.status)});
            s << "  I(" << fmt(x) << ", " << fmt(u) << ") = " << fmt(r.value) << " [" << to_string(r.status) << "]\n";
        }
    a.table("rate.csv", std::move(t));
    return finish(a, s.str(), true, out);
}

TailSettings tail_settings(const ExperimentConfig& c) {
    TailSettings ts;
    ts.u = c.u_values.front();
    ts.x = c.x_values.front();
    ts.side = c.side;
    ts.n_list = c.n_list;
    ts.slope_model = c.slope_model;
    ts.rel_tolerance = c.rel_tolerance;
    ts.abs_tolerance = c.abs_tolerance;
    ts.bootstrap_replicates = c.bootstrap_replicates;
    ts.quadrature = c.quadrature;
    ts.solver = c.solver;
    return ts;
}

std::vector<std::string> tail_comments(const TailExperimentReport& r) {
    return {"slope_model=" + to_string(r.slope_model) + " fitted_rate=" + fmt(r.fitted_rate) + " ci_low=" +
                fmt(r.ci_low) + " ci_high=" + fmt(r.ci_high) + " fitted_rate_plain=" + fmt(r.fitted_rate_plain),
            "theory_rate=" + fmt(r.theory.value) + " theory_status=" + to_string(r.theory.status) +
                " verdict=" + (r.pass ? "pass" : "fail")};
}

int run_tail(const ExperimentConfig& c, const Artifacts& a, std::ostream& out) {
    const auto r = tail_experiment(c.model_setup(), c.scheme_family(), tail_settings(c), c.monte_carlo());
    a.table("tail.csv", to_csv(r), tail_comments(r));
    return finish(a, summary(r), r.pass, out);
}

int run_mdp(const ExperimentConfig& c, const Artifacts& a, std::ostream& out) {
    MdpSettings ms;
    ms.u = c.u_values.front();
    ms.gamma = c.gamma;
    ms.n = c.n_list.back();
    ms.tail_x = c.mdp_tail_x;
    ms.variance_tolerance = c.variance_tolerance;
    ms.normality_level = c.normality_level;
    ms.quadrature = c.quadrature;
    const auto r = mdp_experiment(c.model_setup(), c.scheme_family(), ms, c.monte_carlo());
    a.table("mdp.csv", to_csv(r));
    return finish(a, summary(r), r.pass, out);
}

int run_curve(const ExperimentConfig& c, const Artifacts& a, std::ostream& out) {
    CurveSettings cs;
    cs.u_grid = c.u_grid;
    cs.n_list = c.n_list;
    cs.tail_offset = c.tail_offset;
    cs.z_tolerance = c.z_tolerance;
    cs.tail = tail_settings(c);
    cs.quadrature = c.quadrature;
    const auto r = curve_experiment(c.model_setup(), c.scheme_family(), cs, c.monte_carlo());
    a.table("curve_covariance.csv", to_csv(r),
            {"max_abs_z=" + fmt(r.max_abs_z) + " sup_norm=" + fmt(r.sup_norm) +
             " verdict=" + (r.pass ? "pass" : "fail")});
    for (std::size_t j = 0; j < r.tails.size(); ++j)
        a.table("curve_tail_u" + std::to_string(j) + ".csv", to_csv(r.tails[j]), tail_comments(r.tails[j]));
    return finish(a, summary(r), r.pass, out);
}

int run_figure1(const ExperimentConfig& c, const Artifacts& a, std::ostream& out) {
    const auto d = figure1_data(c.volatility_path(), c.figure1);
    a.table("figure1_objective.csv", d.objective, {"curves=" + std::to_string(d.curve_count)});
    std::vector<std::string> notes;
    for (const auto& b : d.boundaries)
        notes.push_back("lambda_max=" + fmt(b.lambda_max) + " finite_x_lower=" + fmt(b.lower_x) +
                        " finite_x_upper=" + fmt(b.upper_x));
    notes.push_back("max_discrepancy=" + fmt(d.max_discrepancy) + " verdict=" + (d.pass ? "pass" : "fail"));
    a.table("figure1_rates.csv", d.rates, notes);
    return finish(a, summary(d), d.pass, out);
}

}  // namespace

int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    try {
        const Artifacts a(c);
        a.text("config.ini", c.echo());
        switch (c.kind) {
            case ExperimentKind::Simulate: return run_simulate(c, a, out);
            case ExperimentKind::Estimate: return run_estimate(c, a, out);
            case ExperimentKind::Rate: return run_rate(c, a, out);
            case ExperimentKind::Tail: return run_tail(c, a, out);
            case ExperimentKind::Mdp: return run_mdp(c, a, out);
            case ExperimentKind::Curve: return run_curve(c, a, out);
            case ExperimentKind::Figure1: return run_figure1(c, a, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return Error;
}

int run(const std::string& config_path, std::ostream& out, std::ostream& err) {
    ExperimentConfig c;
    try {
        c = load_config(config_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Error;
    }
    return run(c, out, err);
}

int schema(std::ostream& out) {
    out << schema_text();
    return Pass;
}

namespace {

struct Check {
    std::string name;
    std::function<std::string(std::string&)> body;  // returns a detail line; sets the failure reason
};

const std::vector<double>& prop1_lambdas() {
    static const std::vector<double> g = [] {
        std::vector<double> v;
        for (int i = -20; i <= 20; ++i) v.push_back(i * 0.5);
        return v;
    }();
    return g;
}

constexpr double kProp1Us[] = {0.1, 0.5, 1.0, 2.0, 4.0};

std::string bounds_check(const VolatilityPath& vol, const QuadratureSettings& q, std::string& failure) {
    int points = 0;
    for (double u : kProp1Us) {
        for (double l : prop1_lambdas()) {
            const auto v = lambda_eval(l, u, vol, nullptr, q);
            ++points;
            if (!(std::abs(v.value) <= std::abs(l)) || !(std::abs(v.first) <= 1.0) || !(v.second > 0.0)) {
                failure = "bounds violated at lambda=" + fmt(l) + " u=" + fmt(u) + ": Lambda=" + fmt(v.value) +
                          " Lambda'=" + fmt(v.first) + " Lambda''=" + fmt(v.second);
                return {};
            }
        }
        for (double x : {-1.2, 1.2}) {
            const auto r = legendre_rate(x, u, vol, nullptr, q);
            if (!std::isinf(r.value) || r.status != RateStatus::InfiniteOutsideUnitInterval) {
                failure = "I(" + fmt(x) + ", " + fmt(u) + ") is not +infinity";
                return {};
            }
        }
    }
    return std::to_string(points) + " grid points";
}

double golden_sup(const std::function<double(double)>& f, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

}  // namespace

int selftest(const SelftestOptions& options, std::ostream& out) {
    QuadratureSettings q;
    if (options.force_hermite_nodes) {
        q.hermite_nodes = *options.force_hermite_nodes;
        q.adaptive = false;
    }
    if (options.disable_time_change) q.apply_time_change = false;

    const auto flat = VolatilityPath::constant(1.0);
    const auto wave = VolatilityModel::sinusoid(1.0, 0.5, 2.0 * std::numbers::pi).realize();

    std::vector<Check> checks;
    checks.push_back({"rate-bounds-constant", [&](std::string& f) { return bounds_check(flat, q, f); }});
    checks.push_back({"rate-bounds-sinusoid", [&](std::string& f) { return bounds_check(wave, q, f); }});

    checks.push_back({"oracle-bessel", [&](std::string& f) {
        double worst = 0.0;
        for (double u : kProp1Us)
            for (double l : prop1_lambdas())
                worst = std::max(worst, std::abs(lambda_point(l, u, flat, nullptr, q) - bessel_oracle(l, u, 1.0)));
        if (!(worst <= 1e-8)) f = "max |Lambda - Bessel series| = " + fmt(worst) + " > 1e-8";
        return "max difference " + fmt(worst);
    }});

    checks.push_back({"oracle-partition", [&](std::string& f) {
        double worst = 0.0;
        for (double u : kProp1Us)
            for (double l : prop1_lambdas()) {
                const double lam[1] = {l}, us[1] = {u};
                worst = std::max(worst, std::abs(lambda_partition(lam, us, flat, q) - lambda_point(l, u, flat, nullptr, q)));
            }
        if (!(worst <= 1e-8)) f = "max |Lambda^P - Lambda| = " + fmt(worst) + " > 1e-8";
        return "max difference " + fmt(worst);
    }});

    checks.push_back({"oracle-legendre-golden-section", [&](std::string& f) {
        double worst = 0.0;
        for (double x : {-0.8, -0.3, 0.2, 0.55, 0.8}) {
            const auto r = legendre_rate(x, 1.0, flat, nullptr, q);
            const double g = golden_sup([&](double l) { return l * x - lambda_point(l, 1.0, flat, nullptr, q); },
                                        -30.0, 30.0);
            worst = std::max(worst, std::abs(r.value - g));
        }
        if (!(worst <= 1e-8)) f = "Newton and golden-section suprema differ by " + fmt(worst);
        return "max difference " + fmt(worst);
    }});

    checks.push_back({"closed-form-variance", [&](std::string& f) {
        const double v11 = clt_covariance(1.0, 1.0, flat, nullptr, q);
        const double e11 = (1.0 + std::exp(-4.0) - 2.0 * std::exp(-2.0)) / 2.0;
        const double v14 = clt_covariance(1.0, 4.0, flat, nullptr, q);
        const double e14 = 0.5 * std::pow(std::exp(-4.5) - std::exp(-0.5), 2.0);
        const double d = std::max(std::abs(v11 - e11), std::abs(v14 - e14));
        if (!(d <= 1e-12)) f = "covariance differs from the closed form by " + fmt(d);
        return "V(1,1)=" + fmt(v11) + " V(1,4)=" + fmt(v14);
    }});

    checks.push_back({"reduction-unit-time-change", [&](std::string& f) {
        const auto unit = TimeChange::constant(1.0);
        double worst = 0.0;
        for (double u : {0.5, 1.0, 4.0}) {
            for (double l : {-5.0, -1.0, 0.5, 3.0})
                worst = std::max(worst, std::abs(lambda_point(l, u, wave, &unit, q) - lambda_point(l, u, wave, nullptr, q)));
            worst = std::max(worst, std::abs(clt_covariance(u, u, wave, &unit, q) - clt_covariance(u, u, wave, nullptr, q)));
        }
        const auto reg = SamplingScheme::regular(64);
        std::vector<double> times(reg.times().begin(), reg.times().end());
        times[1] *= 1.0 + 1e-9;  // keeps the scheme irregular
        const auto irr = SamplingScheme::irregular(times, 64);
        std::vector<double> dx(64);
        for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = 0.1 * std::sin(1.7 * static_cast<double>(i));
        const double d = std::abs(erltv_irregular(irr, dx, 1.0) - erltv_regular(dx, 1.0));
        if (!(worst <= 1e-12)) f = "T' = 1 changes a weighted quantity by " + fmt(worst);
        return "max difference " + fmt(worst) + "; near-regular estimator gap " + fmt(d);
    }});

    checks.push_back({"reduction-constant-time-change-scaling", [&](std::string& f) {
        const double c = 2.5;
        const auto tc = TimeChange::constant(c);
        double worst = 0.0;
        for (double u : {0.5, 1.0})
            for (double l : {-4.0, 1.0, 6.0})
                worst = std::max(worst, std::abs(lambda_point(l, u, flat, &tc, q) - c * lambda_point(l / c, u, flat, nullptr, q)));
        const double v = clt_covariance(1.0, 1.0, flat, &tc, q) - clt_covariance(1.0, 1.0, flat, nullptr, q) / c;
        worst = std::max(worst, std::abs(v));
        if (!(worst <= 1e-10)) f = "T' = c scaling identities violated by " + fmt(worst);
        return "max difference " + fmt(worst);
    }});

    checks.push_back({"quantile-scheme-density", [&](std::string& f) {
        const auto scheme = SamplingScheme::quantile(100000, [](double v) { return std::sqrt(v); });
        double worst = 0.0;
        for (int i = 1; i <= 10; ++i) {
            const double s = 0.1 * i - 0.05;
            worst = std::max(worst, std::abs(time_change(scheme, s).derivative / (2.0 * s) - 1.0));
        }
        if (!(worst < 0.01)) f = "relative error of T_n' against 2s is " + fmt(worst);
        return "max relative error " + fmt(worst);
    }});

    checks.push_back({"estimator-zero-increments", [&](std::string& f) {
        const auto scheme = SamplingScheme::regular(50);
        std::vector<double> dx(50, 0.0);
        for (double u : default_u_grid())
            if (erltv(scheme, dx, u) != 1.0) f = "V_n(" + fmt(u) + ") != 1 on zero increments";
        return std::string("41 grid points");
    }});

    checks.push_back({"monte-carlo-worker-invariance", [&](std::string& f) {
        ModelSetup m;
        m.jumps = JumpSpec::compound_poisson(5.0, NormalJumpSize{0.0, 0.1});
        const double us[2] = {0.5, 2.0};
        MonteCarloSettings one{200, 7, 1}, three{200, 7, 3};
        const auto a = simulate_estimates(m, SamplingScheme::regular(100), us, one);
        const auto b = simulate_estimates(m, SamplingScheme::regular(100), us, three);
        if (a != b) f = "results depend on the worker count";
        return std::string("200 paths");
    }});

    int failures = 0;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& c : checks) {
        std::string failure, detail;
        try {
            detail = c.body(failure);
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        if (failure.empty()) {
            out << "PASS " << c.name << ": " << detail << '\n';
        } else {
            ++failures;
            out << "FAIL " << c.name << ": " << failure << '\n';
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (failures == 0 ? "selftest passed" : "selftest failed: " + std::to_string(failures) + " check(s)")
        << " in " << std::fixed << std::setprecision(1) << secs << " s\n";
    return failures == 0 ? Pass : Fail;
}

}  // namespace erltv::cli

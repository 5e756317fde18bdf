#include "erltv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "erltv/estimator.hpp"
#include "erltv/io.hpp"

namespace erltv {

namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

const std::vector<ConfigKey> kSchema = {
    {"", "seed", "1", "master seed (unsigned 64-bit)"},

    {"model", "volatility", "constant", "constant | sinusoid | piecewise_grid | cir"},
    {"model", "sigma0", "1", "constant level, or sinusoid centre"},
    {"model", "sigma_amplitude", "0", "sinusoid amplitude"},
    {"model", "sigma_frequency_rad_per_unit_time", "0", "sinusoid angular frequency"},
    {"model", "sigma_grid_values", "", "comma list of sigma values on a uniform grid of [0, 1]"},
    {"model", "sigma_min", "", "positive lower bound; empty uses the model minimum (required for cir)"},
    {"model", "cir_kappa_per_unit_time", "1", "cir mean reversion speed"},
    {"model", "cir_theta", "1", "cir long-run level and starting value"},
    {"model", "cir_eta", "0", "cir volatility of volatility"},
    {"model", "drift", "zero", "zero | constant | grid"},
    {"model", "drift_per_unit_time", "0", "constant drift"},
    {"model", "drift_grid_values_per_unit_time", "", "comma list of drift values on a uniform grid of [0, 1]"},
    {"model", "jumps", "none", "none | compound_poisson | truncated_stable"},
    {"model", "jump_intensity_per_unit_time", "0", "compound Poisson arrival rate"},
    {"model", "jump_size_law", "normal", "normal | laplace"},
    {"model", "jump_size_mean", "0", "normal jump size mean"},
    {"model", "jump_size_stddev", "0.1", "normal jump size standard deviation"},
    {"model", "jump_size_mean_abs", "0.1", "laplace jump size mean absolute value"},
    {"model", "stable_beta", "0.5", "truncated stable index, in [0, 1)"},
    {"model", "stable_scale", "0", "truncated stable Levy density scale"},
    {"model", "stable_epsilon", "0.001", "smallest truncated stable jump size, in (0, 1)"},
    {"model", "euler_substeps_per_gap", "16", "Euler sub-intervals per observation gap"},

    {"scheme", "type", "regular", "regular | irregular | quantile"},
    {"scheme", "n_list", "100", "comma list of sampling frequencies (ignored for irregular)"},
    {"scheme", "times_file", "", "irregular: single column of increasing times in [0, 1]"},
    {"scheme", "quantile_power", "2", "quantile: t_i = (i / n)^(1 / p), limit T(s) = s^p"},

    {"estimator", "u_points", "", "comma list of u values; empty uses the uniform grid below"},
    {"estimator", "u_max", "4", "upper end of the uniform u grid"},
    {"estimator", "u_grid_points", "41", "number of points of the uniform u grid"},

    {"experiment", "kind", "rate", "simulate | estimate | rate | tail | mdp | curve | figure1"},
    {"experiment", "num_paths", "10000", "Monte Carlo paths per n"},
    {"experiment", "source", "simulate", "estimate: zeros | simulate | file"},
    {"experiment", "increments_file", "", "estimate with source=file: CSV of increments"},
    {"experiment", "x", "0.5", "threshold(s); a list for kind=rate"},
    {"experiment", "u", "1", "u value(s); a list for kind=rate"},
    {"experiment", "side", "upper", "tail: upper | lower"},
    {"experiment", "slope_model", "auto", "tail: auto | plain | bahadur-rao"},
    {"experiment", "rel_tolerance", "0.2", "tail: relative tolerance on the fitted rate"},
    {"experiment", "abs_tolerance", "0.005", "tail: absolute tolerance floor on the fitted rate"},
    {"experiment", "bootstrap_replicates", "999", "tail: parametric bootstrap size"},
    {"experiment", "gamma", "0.25", "mdp: m_n = n^gamma"},
    {"experiment", "mdp_tail_x", "0.1", "mdp: threshold of the informational tail check"},
    {"experiment", "variance_tolerance", "0.05", "mdp: relative tolerance on the variance"},
    {"experiment", "normality_level", "0.01", "mdp: KS test level"},
    {"experiment", "tail_offset", "", "curve: per-u tails at x = F(u) + offset; empty disables"},
    {"experiment", "z_tolerance", "3", "curve: bound on |z| of every covariance entry"},
    {"experiment", "figure1_lambda_min", "-10", "figure1: lambda grid start"},
    {"experiment", "figure1_lambda_max", "10", "figure1: lambda grid end"},
    {"experiment", "figure1_lambda_step", "0.05", "figure1: lambda grid step"},
    {"experiment", "figure1_x_min", "-1", "figure1: x grid start"},
    {"experiment", "figure1_x_max", "1", "figure1: x grid end"},
    {"experiment", "figure1_x_step", "0.05", "figure1: x grid step"},
    {"experiment", "figure1_lambda_caps", "5,10,20,50,200", "figure1: lambda_max values for the rate table"},
    {"experiment", "figure1_match_tolerance", "0.001", "figure1: grid sup vs solver tolerance"},

    {"numerics", "hermite_nodes", "200", "Gauss-Hermite nodes"},
    {"numerics", "domain_halfwidth_sigmas", "12", "minimum half-width of the trapezoid fallback"},
    {"numerics", "time_panels", "512", "midpoint panels of the outer time integral"},
    {"numerics", "tolerance", "1e-10", "root-finding tolerance"},
    {"numerics", "adaptive_inner_rule", "true", "allow the trapezoid fallback"},
    {"numerics", "apply_time_change", "true", "weight by the limiting time-change density"},
    {"numerics", "lambda_max", "200", "Legendre solver cap on |lambda|"},
    {"numerics", "max_iterations", "200", "Legendre solver iteration cap"},
    {"numerics", "workers", "0", "Monte Carlo threads; 0 uses the machine parallelism"},

    {"output", "directory", "out", "output directory (created if missing)"},
    {"output", "prefix", "erltv", "file name prefix"},
};

std::string full_key(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

std::string label(const std::string& name) {
    const auto dot = name.find('.');
    if (dot == std::string::npos) return name;
    return "[" + name.substr(0, dot) + "] " + name.substr(dot + 1);
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

class Reader {
public:
    explicit Reader(const std::map<std::string, std::string>& values) : values_(values) {}

    const std::string& str(const std::string& name) const { return values_.at(name); }

    double real(const std::string& name) const { return parse_real(name, str(name)); }

    std::optional<double> optional_real(const std::string& name) const {
        if (str(name).empty()) return std::nullopt;
        return real(name);
    }

    std::uint64_t unsigned_int(const std::string& name) const {
        const std::string& s = str(name);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            throw ConfigError(label(name) + ": expected a nonnegative integer, got '" + s + "'");
        return v;
    }

    int integer(const std::string& name) const {
        const auto v = unsigned_int(name);
        if (v > 1'000'000'000ULL) throw ConfigError(label(name) + ": value too large");
        return static_cast<int>(v);
    }

    bool boolean(const std::string& name) const {
        std::string s = str(name);
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "0" || s == "no" || s == "off") return false;
        throw ConfigError(label(name) + ": expected true or false, got '" + str(name) + "'");
    }

    std::vector<double> reals(const std::string& name) const {
        std::vector<double> out;
        for (const auto& item : split(str(name))) out.push_back(parse_real(name, item));
        return out;
    }

    std::vector<std::size_t> sizes(const std::string& name) const {
        std::vector<std::size_t> out;
        for (const auto& item : split(str(name))) {
            std::size_t v = 0;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc{} || ptr != item.data() + item.size())
                throw ConfigError(label(name) + ": expected a list of integers, got '" + item + "'");
            out.push_back(v);
        }
        return out;
    }

    std::string choice(const std::string& name, std::initializer_list<const char*> options) const {
        const std::string& s = str(name);
        for (const char* o : options)
            if (s == o) return s;
        std::string msg = label(name) + ": '" + s + "' is not one of";
        for (const char* o : options) msg += std::string(" ") + o;
        throw ConfigError(msg);
    }

private:
    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        if (trim(s).empty()) return out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(trim(item));
        return out;
    }

    static double parse_real(const std::string& name, const std::string& s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
            throw ConfigError(label(name) + ": expected a finite number, got '" + s + "'");
        return v;
    }

    const std::map<std::string, std::string>& values_;
};

// Uniform grid; steps of the form 1/m are generated as (k0 + i) / m so that grid values print cleanly.
std::vector<double> uniform_grid(double lo, double hi, double step, const std::string& what) {
    if (!(step > 0.0)) throw ConfigError(what + ": step must be positive");
    if (!(hi >= lo)) throw ConfigError(what + ": end must not be below start");
    const double span = (hi - lo) / step;
    const auto count = static_cast<std::size_t>(std::llround(std::floor(span + 1e-9))) + 1;
    if (count > 1'000'000) throw ConfigError(what + ": grid too large");
    std::vector<double> g;
    const double m = 1.0 / step;
    const bool reciprocal = std::abs(m - std::round(m)) < 1e-9 && std::abs(lo * m - std::round(lo * m)) < 1e-9;
    for (std::size_t i = 0; i < count; ++i)
        g.push_back(reciprocal ? (std::round(lo * m) + static_cast<double>(i)) / std::round(m)
                               : lo + static_cast<double>(i) * step);
    return g;
}

fs::path resolve_path(const std::string& base_dir, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : fs::path(base_dir) / path;
}

template <class Fn>
auto in_section(const std::string& section, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("[" + section + "] " + e.what());
    }
}

void build_model(ExperimentConfig& c, const Reader& r) {
    in_section("model", [&] {
        const auto vol = r.choice("model.volatility", {"constant", "sinusoid", "piecewise_grid", "cir"});
        const auto smin = r.optional_real("model.sigma_min");
        if (vol == "constant") {
            c.volatility = VolatilityModel::constant(r.real("model.sigma0"), smin);
        } else if (vol == "sinusoid") {
            c.volatility = VolatilityModel::sinusoid(r.real("model.sigma0"), r.real("model.sigma_amplitude"),
                                                     r.real("model.sigma_frequency_rad_per_unit_time"), smin);
        } else if (vol == "piecewise_grid") {
            c.volatility = VolatilityModel::piecewise_grid(r.reals("model.sigma_grid_values"), smin);
        } else {
            if (!smin) throw ConfigError("[model] sigma_min: required for volatility = cir");
            c.volatility = VolatilityModel::cir_like(r.real("model.cir_kappa_per_unit_time"),
                                                     r.real("model.cir_theta"), r.real("model.cir_eta"), *smin);
        }

        const auto drift = r.choice("model.drift", {"zero", "constant", "grid"});
        if (drift == "constant") c.drift = DriftSpec::constant(r.real("model.drift_per_unit_time"));
        else if (drift == "grid") c.drift = DriftSpec::on_grid(r.reals("model.drift_grid_values_per_unit_time"));

        const auto jumps = r.choice("model.jumps", {"none", "compound_poisson", "truncated_stable"});
        if (jumps == "compound_poisson") {
            const auto law = r.choice("model.jump_size_law", {"normal", "laplace"});
            JumpSizeSampler sizes = NormalJumpSize{r.real("model.jump_size_mean"), r.real("model.jump_size_stddev")};
            if (law == "laplace") sizes = LaplaceJumpSize{r.real("model.jump_size_mean_abs")};
            c.jumps = JumpSpec::compound_poisson(r.real("model.jump_intensity_per_unit_time"), sizes);
        } else if (jumps == "truncated_stable") {
            c.jumps = JumpSpec::truncated_stable(r.real("model.stable_beta"), r.real("model.stable_scale"),
                                                 r.real("model.stable_epsilon"));
        }
        c.substeps = r.integer("model.euler_substeps_per_gap");
        if (c.substeps < 1) throw ConfigError("[model] euler_substeps_per_gap: must be >= 1");
        return 0;
    });
}

void build_scheme_section(ExperimentConfig& c, const Reader& r, const std::string& base_dir) {
    in_section("scheme", [&] {
        const auto type = r.choice("scheme.type", {"regular", "irregular", "quantile"});
        c.scheme_type = type == "regular"     ? SchemeType::Regular
                        : type == "irregular" ? SchemeType::Irregular
                                              : SchemeType::Quantile;
        c.quantile_power = r.real("scheme.quantile_power");
        if (c.scheme_type == SchemeType::Irregular) {
            if (r.str("scheme.times_file").empty())
                throw ConfigError("[scheme] times_file: required for type = irregular");
            c.times = read_times_file(resolve_path(base_dir, r.str("scheme.times_file")).string());
            if (c.times.size() < 2) throw ConfigError("[scheme] times_file: needs at least two times");
            c.n_list = {c.times.size() - 1};
            SamplingScheme::irregular(c.times, c.n_list.front());
        } else {
            c.n_list = r.sizes("scheme.n_list");
            if (c.n_list.empty()) throw ConfigError("[scheme] n_list: must not be empty");
            for (std::size_t i = 0; i < c.n_list.size(); ++i) {
                if (c.n_list[i] == 0) throw ConfigError("[scheme] n_list: values must be positive");
                if (i > 0 && c.n_list[i] <= c.n_list[i - 1])
                    throw ConfigError("[scheme] n_list: values must be strictly increasing");
            }
            if (c.scheme_type == SchemeType::Quantile && !(c.quantile_power > 0.0))
                throw ConfigError("[scheme] quantile_power: must be positive");
        }
        return 0;
    });
}

void build_estimator(ExperimentConfig& c, const Reader& r) {
    in_section("estimator", [&] {
        c.u_grid = r.reals("estimator.u_points");
        if (c.u_grid.empty()) {
            const int points = r.integer("estimator.u_grid_points");
            if (points < 1) throw ConfigError("[estimator] u_grid_points: must be >= 1");
            c.u_grid = default_u_grid(r.real("estimator.u_max"), static_cast<std::size_t>(points));
        }
        for (std::size_t i = 0; i < c.u_grid.size(); ++i) {
            if (!(c.u_grid[i] >= 0.0)) throw ConfigError("[estimator] u_points: values must be >= 0");
            if (i > 0 && c.u_grid[i] < c.u_grid[i - 1])
                throw ConfigError("[estimator] u_points: values must be nondecreasing");
        }
        return 0;
    });
}

void build_experiment(ExperimentConfig& c, const Reader& r, const std::string& base_dir) {
    const auto kind = r.choice("experiment.kind", {"simulate", "estimate", "rate", "tail", "mdp", "curve", "figure1"});
    static const std::map<std::string, ExperimentKind> kinds = {
        {"simulate", ExperimentKind::Simulate}, {"estimate", ExperimentKind::Estimate},
        {"rate", ExperimentKind::Rate},         {"tail", ExperimentKind::Tail},
        {"mdp", ExperimentKind::Mdp},           {"curve", ExperimentKind::Curve},
        {"figure1", ExperimentKind::Figure1}};
    c.kind = kinds.at(kind);

    c.num_paths = r.unsigned_int("experiment.num_paths");
    const auto source = r.choice("experiment.source", {"zeros", "simulate", "file"});
    c.source = source == "zeros" ? IncrementSource::Zeros
               : source == "file" ? IncrementSource::File
                                  : IncrementSource::Simulate;
    if (!r.str("experiment.increments_file").empty())
        c.increments_file = resolve_path(base_dir, r.str("experiment.increments_file")).string();
    if (c.kind == ExperimentKind::Estimate && c.source == IncrementSource::File && c.increments_file.empty())
        throw ConfigError("[experiment] increments_file: required for source = file");

    c.x_values = r.reals("experiment.x");
    c.u_values = r.reals("experiment.u");
    if (c.x_values.empty()) throw ConfigError("[experiment] x: must not be empty");
    if (c.u_values.empty()) throw ConfigError("[experiment] u: must not be empty");
    const bool single = c.kind == ExperimentKind::Tail || c.kind == ExperimentKind::Mdp ||
                        c.kind == ExperimentKind::Figure1;
    if (single && c.u_values.size() != 1) throw ConfigError("[experiment] u: kind = " + kind + " takes one value");
    if (c.kind == ExperimentKind::Tail && c.x_values.size() != 1)
        throw ConfigError("[experiment] x: kind = tail takes one value");
    for (double u : c.u_values)
        if (!(u >= 0.0)) throw ConfigError("[experiment] u: values must be >= 0");

    c.side = r.choice("experiment.side", {"upper", "lower"}) == "upper" ? TailSide::Upper : TailSide::Lower;
    const auto slope = r.choice("experiment.slope_model", {"auto", "plain", "bahadur-rao"});
    c.slope_model = slope == "auto" ? SlopeModel::Auto : slope == "plain" ? SlopeModel::Plain : SlopeModel::BahadurRao;
    c.rel_tolerance = r.real("experiment.rel_tolerance");
    c.abs_tolerance = r.real("experiment.abs_tolerance");
    c.bootstrap_replicates = r.integer("experiment.bootstrap_replicates");
    c.gamma = r.real("experiment.gamma");
    c.mdp_tail_x = r.real("experiment.mdp_tail_x");
    c.variance_tolerance = r.real("experiment.variance_tolerance");
    c.normality_level = r.real("experiment.normality_level");
    c.tail_offset = r.optional_real("experiment.tail_offset");
    c.z_tolerance = r.real("experiment.z_tolerance");

    if (c.kind == ExperimentKind::Tail && c.num_paths < 10000)
        throw ConfigError("[experiment] num_paths: tail experiments need at least 10000 paths");
    if ((c.kind == ExperimentKind::Mdp || c.kind == ExperimentKind::Curve) && c.num_paths < 2)
        throw ConfigError("[experiment] num_paths: at least 2 paths are needed");
    if (c.kind == ExperimentKind::Mdp) {
        const bool irregular = c.scheme_type != SchemeType::Regular;
        const double cap = irregular ? 0.25 : 0.5;
        if (!(c.gamma > 0.0 && c.gamma < cap))
            throw ConfigError("[experiment] gamma: must lie in (0, " + format_double(cap) + ") for " +
                              (irregular ? "irregular" : "regular") + " sampling");
        if (c.u_values.front() == 0.0) throw ConfigError("[experiment] u: u = 0 is degenerate for kind = mdp");
    }

    auto& f = c.figure1;
    f.lambda_grid = uniform_grid(r.real("experiment.figure1_lambda_min"), r.real("experiment.figure1_lambda_max"),
                                 r.real("experiment.figure1_lambda_step"), "[experiment] figure1 lambda grid");
    f.x_grid = uniform_grid(r.real("experiment.figure1_x_min"), r.real("experiment.figure1_x_max"),
                            r.real("experiment.figure1_x_step"), "[experiment] figure1 x grid");
    f.lambda_max_values = r.reals("experiment.figure1_lambda_caps");
    if (f.lambda_max_values.empty()) throw ConfigError("[experiment] figure1_lambda_caps: must not be empty");
    for (double v : f.lambda_max_values)
        if (!(v > 0.0)) throw ConfigError("[experiment] figure1_lambda_caps: values must be positive");
    f.match_tolerance = r.real("experiment.figure1_match_tolerance");
    f.u = c.u_values.front();
}

void build_numerics(ExperimentConfig& c, const Reader& r) {
    in_section("numerics", [&] {
        auto& q = c.quadrature;
        q.hermite_nodes = r.integer("numerics.hermite_nodes");
        q.domain_halfwidth_sigmas = r.real("numerics.domain_halfwidth_sigmas");
        q.time_panels = r.integer("numerics.time_panels");
        q.tolerance = r.real("numerics.tolerance");
        q.adaptive = r.boolean("numerics.adaptive_inner_rule");
        q.apply_time_change = r.boolean("numerics.apply_time_change");
        q.validate();
        c.solver.lambda_max = r.real("numerics.lambda_max");
        c.solver.max_iterations = r.integer("numerics.max_iterations");
        if (!(c.solver.lambda_max > 0.0)) throw ConfigError("[numerics] lambda_max: must be positive");
        if (c.solver.max_iterations < 1) throw ConfigError("[numerics] max_iterations: must be >= 1");
        c.workers = r.unsigned_int("numerics.workers");
        c.figure1.quadrature = q;
        return 0;
    });
}

}  // namespace

const std::vector<ConfigKey>& config_schema() { return kSchema; }

std::string schema_text() {
    std::ostringstream os;
    os << "# Config grammar: INI sections, 'key = value' lines, '#' or ';' comments.\n"
          "# Unknown sections or keys are rejected. Lists are comma separated.\n";
    std::string section = "\x01";
    for (const auto& k : kSchema) {
        if (k.section != section) {
            section = k.section;
            os << '\n' << (section.empty() ? "# (root level)" : "[" + section + "]") << '\n';
        }
        os << k.key << " = " << k.default_value << "    # " << k.help << '\n';
    }
    return os.str();
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Estimate: return "estimate";
        case ExperimentKind::Rate: return "rate";
        case ExperimentKind::Tail: return "tail";
        case ExperimentKind::Mdp: return "mdp";
        case ExperimentKind::Curve: return "curve";
        case ExperimentKind::Figure1: return "figure1";
    }
    return "unknown";
}

ExperimentConfig parse_config_string(const std::string& text, const std::string& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config syntax error at line " + std::to_string(e.line()) + ": " + e.message());
    }

    std::set<std::string> sections, known;
    for (const auto& k : kSchema) {
        known.insert(full_key(k.section, k.key));
        if (!k.section.empty()) sections.insert(k.section);
    }

    std::map<std::string, std::string> values;
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            if (sections.count(name) && trim(node.data()).empty()) continue;
            if (!known.count(name)) throw ConfigError("unknown key '" + name + "' at root level");
            values[name] = trim(node.data());
            continue;
        }
        if (!sections.count(name)) throw ConfigError("unknown section [" + name + "]");
        for (const auto& [key, leaf] : node) {
            const auto full = full_key(name, key);
            if (!known.count(full)) throw ConfigError("unknown key '" + key + "' in section [" + name + "]");
            values[full] = trim(leaf.data());
        }
    }
    for (const auto& k : kSchema) values.try_emplace(full_key(k.section, k.key), k.default_value);

    ExperimentConfig c;
    c.resolved = values;
    const Reader r(values);
    c.seed = r.unsigned_int("seed");
    build_model(c, r);
    build_scheme_section(c, r, base_dir);
    build_estimator(c, r);
    build_experiment(c, r, base_dir);
    build_numerics(c, r);
    c.output_directory = r.str("output.directory");
    c.output_prefix = r.str("output.prefix");
    if (c.output_directory.empty()) throw ConfigError("[output] directory: must not be empty");
    if (c.output_prefix.empty() || c.output_prefix.find('/') != std::string::npos)
        throw ConfigError("[output] prefix: must be a nonempty file name component");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    auto parent = fs::path(path).parent_path();
    return parse_config_string(ss.str(), parent.empty() ? "." : parent.string());
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    std::string section = "\x01";
    for (const auto& k : kSchema) {
        if (k.section != section) {
            section = k.section;
            if (!section.empty()) os << "\n[" << section << "]\n";
        }
        os << k.key << " = " << resolved.at(full_key(k.section, k.key)) << '\n';
    }
    return os.str();
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(echo()); }

std::string ExperimentConfig::output_root() const {
    const char* root = std::getenv("ERLTV_OUTPUT_ROOT");
    fs::path dir(output_directory);
    if (root && *root && dir.is_relative()) return (fs::path(root) / dir).string();
    return dir.string();
}

std::vector<std::string> ExperimentConfig::header_comments() const {
    return {"config_hash=" + hash() + " seed=" + std::to_string(seed)};
}

SchemeFamily ExperimentConfig::scheme_family() const {
    switch (scheme_type) {
        case SchemeType::Regular: return SchemeFamily::regular();
        case SchemeType::Quantile: return SchemeFamily::quantile_power(quantile_power);
        case SchemeType::Irregular: return SchemeFamily::fixed(SamplingScheme::irregular(times, n_list.front()));
    }
    return SchemeFamily::regular();
}

VolatilityPath ExperimentConfig::volatility_path() const {
    if (volatility.is_stochastic()) return volatility.realize(seed);
    return volatility.realize();
}

ModelSetup ExperimentConfig::model_setup() const { return {volatility_path(), drift, jumps, substeps}; }

MonteCarloSettings ExperimentConfig::monte_carlo() const { return {num_paths, seed, workers}; }

}  // namespace erltv

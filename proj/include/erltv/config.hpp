#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erltv/deviation_lab.hpp"
#include "erltv/market_model.hpp"
#include "erltv/rate_functions.hpp"

namespace erltv {

/// Thrown for a config that fails to parse or violates an invariant; the message names the key.
class ConfigError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// One entry of the config grammar. An empty section denotes the root level.
struct ConfigKey {
    std::string section;
    std::string key;
    std::string default_value;
    std::string help;
};

const std::vector<ConfigKey>& config_schema();

/// Human-readable grammar, one line per key.
std::string schema_text();

enum class ExperimentKind { Simulate, Estimate, Rate, Tail, Mdp, Curve, Figure1 };
enum class SchemeType { Regular, Irregular, Quantile };
enum class IncrementSource { Zeros, Simulate, File };

std::string to_string(ExperimentKind k);

struct ExperimentConfig {
    std::uint64_t seed = 1;

    VolatilityModel volatility = VolatilityModel::constant(1.0);
    DriftSpec drift = DriftSpec::zero();
    JumpSpec jumps = JumpSpec::none();
    int substeps = 16;

    SchemeType scheme_type = SchemeType::Regular;
    std::vector<std::size_t> n_list;
    std::vector<double> times;  ///< irregular schemes only
    double quantile_power = 2.0;

    std::vector<double> u_grid;

    ExperimentKind kind = ExperimentKind::Rate;
    std::size_t num_paths = 10000;
    IncrementSource source = IncrementSource::Simulate;
    std::string increments_file;
    std::vector<double> x_values;
    std::vector<double> u_values;
    TailSide side = TailSide::Upper;
    SlopeModel slope_model = SlopeModel::Auto;
    double rel_tolerance = 0.2;
    double abs_tolerance = 0.005;
    int bootstrap_replicates = 999;
    double gamma = 0.25;
    double mdp_tail_x = 0.1;
    double variance_tolerance = 0.05;
    double normality_level = 0.01;
    std::optional<double> tail_offset;
    double z_tolerance = 3.0;
    Figure1Settings figure1;

    QuadratureSettings quadrature;
    LegendreSolver solver;
    std::size_t workers = 0;

    std::string output_directory = "out";
    std::string output_prefix = "erltv";

    /// Every key of the grammar with the value in effect, in schema order.
    std::map<std::string, std::string> resolved;

    /// INI text of the resolved configuration.
    std::string echo() const;
    /// FNV-1a digest of echo().
    std::string hash() const;
    /// Output directory after applying the ERLTV_OUTPUT_ROOT override.
    std::string output_root() const;
    /// Comment lines "config_hash=... seed=..." for artifact headers.
    std::vector<std::string> header_comments() const;

    SchemeFamily scheme_family() const;
    /// The volatility path used by every experiment; stochastic models draw it from the seed.
    VolatilityPath volatility_path() const;
    ModelSetup model_setup() const;
    MonteCarloSettings monte_carlo() const;
};

ExperimentConfig parse_config_string(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

}  // namespace erltv

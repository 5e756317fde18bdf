#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "erltv/io.hpp"
#include "erltv/market_model.hpp"
#include "erltv/rate_functions.hpp"
#include "erltv/simulator.hpp"

namespace erltv {

/// Raised when a tail experiment never observes the event at any n.
class UnderpoweredError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything needed to simulate paths, with the volatility path held fixed.
struct ModelSetup {
    VolatilityPath vol = VolatilityPath::constant(1.0);
    DriftSpec drift = DriftSpec::zero();
    JumpSpec jumps = JumpSpec::none();
    int substeps = 16;
};

/// A sampling scheme for every n, together with its limiting time change.
struct SchemeFamily {
    std::function<SamplingScheme(std::size_t)> make;
    TimeChange limit = TimeChange::identity();
    bool irregular = false;
    std::string description;

    static SchemeFamily regular();
    /// t_i = (i / n)^{1 / p}, so that T(s) = s^p.
    static SchemeFamily quantile_power(double p);
    /// The same scheme for every n (for example one loaded from a file).
    static SchemeFamily fixed(SamplingScheme scheme);
};

struct MonteCarloSettings {
    std::size_t num_paths = 10000;
    std::uint64_t seed = 1;
    std::size_t workers = 0;  ///< 0 selects the hardware concurrency
};

/// V_n(u_j) for every path, row-major num_paths x u_grid.size(). Path p uses
/// the substream derive_seed(derive_seed(seed, n), p), so results do not
/// depend on the worker count.
std::vector<double> simulate_estimates(const ModelSetup& model, const SamplingScheme& scheme,
                                       std::span<const double> u_grid, const MonteCarloSettings& mc);

enum class TailSide { Upper, Lower };
std::string to_string(TailSide side);

/// Finite-n model for -(1/n) log p.
///  Plain: I + c / n.
///  BahadurRao: I + (log n) / (2 n) + c / n, the polynomial prefactor of a
///    non-lattice mean's tail probability.
///  Auto: BahadurRao when the optimal tilt is nonzero, Plain at the mean.
enum class SlopeModel { Auto, Plain, BahadurRao };
std::string to_string(SlopeModel m);

struct TailCell {
    std::size_t n = 0;
    std::size_t count = 0;
    double phat = 0.0;
    double std_error = 0.0;
    double log_slope = 0.0;  ///< -(1/n) log phat, or a lower bound when censored
    bool censored = false;
};

struct TailExperimentReport {
    double u = 0.0;
    double x = 0.0;
    TailSide side = TailSide::Upper;
    std::size_t num_paths = 0;
    std::vector<TailCell> cells;
    SlopeModel slope_model = SlopeModel::Plain;
    double fitted_rate = 0.0;
    double fitted_rate_plain = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    RateFunctionResult theory;
    double rel_tolerance = 0.2;
    double abs_tolerance = 0.01;
    bool certified_zero = false;  ///< event impossible because |V_n| <= 1
    bool pass = false;
};

struct TailSettings {
    double u = 1.0;
    double x = 0.5;
    TailSide side = TailSide::Upper;
    std::vector<std::size_t> n_list = {25, 50, 100};
    SlopeModel slope_model = SlopeModel::Auto;
    double rel_tolerance = 0.2;
    double abs_tolerance = 0.01;
    int bootstrap_replicates = 999;
    QuadratureSettings quadrature;
    LegendreSolver solver;
};

TailExperimentReport tail_experiment(const ModelSetup& model, const SchemeFamily& family, const TailSettings& settings,
                                     const MonteCarloSettings& mc);

/// Assembles a report from per-n event counts; shared by the single-u and curve experiments.
TailExperimentReport summarize_tail(const TailSettings& settings, std::span<const std::size_t> counts,
                                    std::size_t num_paths, const RateFunctionResult& theory, std::uint64_t seed);

struct MdpReport {
    double u = 0.0;
    double gamma = 0.0;
    std::size_t n = 0;
    double m_n = 0.0;
    std::size_t num_paths = 0;
    double sample_variance = 0.0;   ///< of m_n (V_n(u) - F(u))
    double scaled_variance = 0.0;   ///< sample_variance * n / m_n^2
    double theory_variance = 0.0;   ///< clt_covariance(u, u)
    double relative_error = 0.0;
    double ks_statistic = 0.0;
    double normality_p_value = 0.0;
    double tail_x = 0.0;
    double tail_phat = 0.0;
    double tail_log_rate = 0.0;     ///< -s_n log P(m_n (V_n - F) > x)
    double tail_theory_rate = 0.0;  ///< mdp_rate(x, u)
    double variance_tolerance = 0.05;
    double normality_level = 0.01;
    bool pass = false;
};

struct MdpSettings {
    double u = 1.0;
    double gamma = 0.25;
    std::size_t n = 10000;
    double tail_x = 0.1;
    double variance_tolerance = 0.05;
    double normality_level = 0.01;
    QuadratureSettings quadrature;
};

MdpReport mdp_experiment(const ModelSetup& model, const SchemeFamily& family, const MdpSettings& settings,
                         const MonteCarloSettings& mc);

struct Figure1Settings {
    std::vector<double> lambda_grid;
    std::vector<double> x_grid;
    double u = 1.0;
    std::vector<double> lambda_max_values = {5.0, 10.0, 20.0, 50.0, 200.0};
    double match_tolerance = 1e-3;
    QuadratureSettings quadrature;

    /// lambda in [-10, 10] step 0.05, x in [-1, 1] step 0.05, u = 1.
    static Figure1Settings paper_defaults();
};

struct Figure1Boundary {
    double lambda_max = 0.0;
    double upper_x = 0.0;  ///< largest grid x with a converged rate inside the window
    double lower_x = 0.0;  ///< smallest such x
};

struct Figure1Data {
    CsvTable objective;  ///< x,lambda,objective
    CsvTable rates;      ///< x,I,status,lambda_max
    std::size_t curve_count = 0;
    std::vector<double> grid_max;     ///< per x, max over the lambda grid
    std::vector<double> solver_rate;  ///< per x, legendre_rate with the largest lambda_max
    std::vector<bool> compared;       ///< converged with lambda* inside the plotted window
    double max_discrepancy = 0.0;
    std::vector<Figure1Boundary> boundaries;
    bool pass = false;
};

Figure1Data figure1_data(const VolatilityPath& vol, const Figure1Settings& settings);

struct CurveReport {
    std::vector<double> u_grid;
    std::size_t n = 0;
    std::size_t num_paths = 0;
    std::vector<double> empirical_cov;  ///< row-major, of sqrt(n) (V_n(u_j) - F(u_j))
    std::vector<double> theory_cov;
    std::vector<double> std_error;
    std::vector<double> z_score;
    double max_abs_z = 0.0;
    double sup_norm = 0.0;  ///< max over paths and grid of |V_n(u)|
    std::vector<TailExperimentReport> tails;
    double z_tolerance = 3.0;
    bool pass = false;
};

struct CurveSettings {
    std::vector<double> u_grid = {0.5, 1.0, 2.0, 4.0};
    std::vector<std::size_t> n_list = {10000};
    /// When set, per-u tail reports for x = F(u) + offset are produced from the same curves.
    std::optional<double> tail_offset;
    double z_tolerance = 3.0;
    TailSettings tail;  ///< tolerances and solver settings for the per-u tails
    QuadratureSettings quadrature;
};

CurveReport curve_experiment(const ModelSetup& model, const SchemeFamily& family, const CurveSettings& settings,
                             const MonteCarloSettings& mc);

CsvTable to_csv(const TailExperimentReport& r);
CsvTable to_csv(const MdpReport& r);
CsvTable to_csv(const CurveReport& r);
std::string summary(const TailExperimentReport& r);
std::string summary(const MdpReport& r);
std::string summary(const CurveReport& r);
std::string summary(const Figure1Data& d);

}  // namespace erltv

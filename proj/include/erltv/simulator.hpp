#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erltv/market_model.hpp"

namespace erltv {

/// Observed log-price increments over a sampling scheme.
struct PathIncrements {
    SamplingScheme scheme;
    std::vector<double> dx;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> sigma_seed;
};

/// Substream identifiers under a path seed. Toggling one component never
/// perturbs the draws of another.
enum class Stream : std::uint64_t { Brownian = 1, Jumps = 2 };

/// Simulator for dX = a dt + sigma dW + jumps, with the volatility path fixed.
///
/// Over a gap where sigma and the drift are constant the increment is drawn
/// exactly; otherwise `substeps` Euler sub-intervals are used. Jumps are added
/// from an independent substream.
class IncrementSimulator {
public:
    IncrementSimulator(VolatilityPath vol, DriftSpec drift, JumpSpec jumps, SamplingScheme scheme,
                       int substeps = 16);

    const SamplingScheme& scheme() const { return scheme_; }

    /// Writes scheme().size() increments for `seed` into `out`.
    void fill(std::uint64_t seed, std::span<double> out) const;
    /// Continuous part only (drift + Brownian).
    void fill_continuous(std::uint64_t seed, std::span<double> out) const;
    /// Jump sums per gap only.
    void fill_jumps(std::uint64_t seed, std::span<double> out) const;

    PathIncrements simulate(std::uint64_t seed) const;

private:
    void add_jumps(std::uint64_t seed, std::span<double> out) const;

    VolatilityPath vol_;
    DriftSpec drift_;
    JumpSpec jumps_;
    SamplingScheme scheme_;
    int substeps_;
    bool exact_;
};

PathIncrements simulate_increments(const VolatilityModel& vol, const DriftSpec& drift, const JumpSpec& jumps,
                                   const SamplingScheme& scheme, std::uint64_t seed,
                                   std::optional<std::uint64_t> sigma_seed, int substeps = 16);

/// Writes `i,t_start,t_end,dx` rows (1-based i) after the given comment header lines.
void write_increments_csv(const std::string& path, const PathIncrements& path_increments,
                          std::span<const std::string> header_comments = {});

/// Reads increments written by write_increments_csv; n is the scheme's nominal frequency.
PathIncrements read_increments_csv(const std::string& path, std::size_t n);

}  // namespace erltv

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "erltv/config.hpp"

namespace erltv::cli {

/// Exit statuses. Verdict-bearing experiments return Fail when their check fails.
enum ExitCode : int { Pass = 0, Error = 1, Fail = 2 };

/// Runs the experiment described by the config file and writes its artifacts.
int run(const std::string& config_path, std::ostream& out, std::ostream& err);
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

struct SelftestOptions {
    /// Pins the inner rule to Gauss-Hermite with this many nodes.
    std::optional<int> force_hermite_nodes;
    /// Ignores the time-change density in every T'-weighted quantity.
    bool disable_time_change = false;
};

/// Fast invariant suite; prints one PASS/FAIL line per check.
int selftest(const SelftestOptions& options, std::ostream& out);

/// Prints the config grammar.
int schema(std::ostream& out);

}  // namespace erltv::cli

#include "erltv/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/random/normal_distribution.hpp>

#include "erltv/io.hpp"
#include "erltv/numeric.hpp"

namespace erltv {

namespace {

std::mt19937_64 stream_engine(std::uint64_t seed, Stream stream) {
    return std::mt19937_64(derive_seed(seed, static_cast<std::uint64_t>(stream)));
}

struct JumpSizeDraw {
    std::mt19937_64& engine;
    std::uniform_real_distribution<double> uniform{0.0, 1.0};

    double sign() { return uniform(engine) < 0.5 ? -1.0 : 1.0; }

    double operator()(const NormalJumpSize& s) {
        boost::random::normal_distribution<double> normal(s.mean, s.stddev);
        return normal(engine);
    }
    double operator()(const LaplaceJumpSize& s) {
        std::exponential_distribution<double> expo(1.0 / s.mean_abs);
        return sign() * expo(engine);
    }
    double operator()(const TruncatedStableJumps& t) {
        const double v = uniform(engine);
        double size;
        if (t.beta == 0.0) {
            size = std::pow(t.epsilon, 1.0 - v);
        } else {
            const double lo = std::pow(t.epsilon, -t.beta);
            size = std::pow(lo - v * (lo - 1.0), -1.0 / t.beta);
        }
        return sign() * size;
    }
};

}  // namespace

IncrementSimulator::IncrementSimulator(VolatilityPath vol, DriftSpec drift, JumpSpec jumps,
                                       SamplingScheme scheme, int substeps)
    : vol_(std::move(vol)),
      drift_(std::move(drift)),
      jumps_(std::move(jumps)),
      scheme_(std::move(scheme)),
      substeps_(substeps),
      exact_(vol_.is_constant() && drift_.is_constant()) {
    if (substeps_ < 1) throw ParameterError("simulate_increments: substeps must be >= 1");
    if (!(jumps_.beta() < 1.0))
        throw ParameterError("jump index beta must be < 1 (finite-variation jumps)");
}

void IncrementSimulator::fill_continuous(std::uint64_t seed, std::span<double> out) const {
    if (out.size() != scheme_.size()) throw ParameterError("increment buffer size does not match scheme");
    auto engine = stream_engine(seed, Stream::Brownian);
    boost::random::normal_distribution<double> normal;
    const auto times = scheme_.times();
    const auto gaps = scheme_.gaps();

    if (exact_) {
        const double sigma = vol_.constant_value();
        const double a0 = drift_(0.0);
        if (scheme_.is_regular()) {
            const double scale = sigma * std::sqrt(gaps[0]);
            const double mean = a0 * gaps[0];
            for (auto& d : out) d = mean + scale * normal(engine);
        } else {
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = a0 * gaps[i] + sigma * std::sqrt(gaps[i]) * normal(engine);
        }
        return;
    }

    for (std::size_t i = 0; i < out.size(); ++i) {
        const double dt = gaps[i] / substeps_;
        const double sqdt = std::sqrt(dt);
        double acc = 0.0;
        for (int k = 0; k < substeps_; ++k) {
            const double s = times[i] + k * dt;
            acc += drift_(s) * dt + vol_(s) * sqdt * normal(engine);
        }
        out[i] = acc;
    }
}

void IncrementSimulator::add_jumps(std::uint64_t seed, std::span<double> out) const {
    const double rate = jumps_.intensity();
    if (rate == 0.0) return;
    auto engine = stream_engine(seed, Stream::Jumps);
    JumpSizeDraw draw{engine};
    std::exponential_distribution<double> wait(rate);
    const auto times = scheme_.times();
    const double end = scheme_.end_time();
    // arrivals on [0, end], each added to the gap (t_{i-1}, t_i] containing it
    for (double t = wait(engine); t <= end; t += wait(engine)) {
        const auto it = std::lower_bound(times.begin() + 1, times.end(), t);
        const auto i = static_cast<std::size_t>(it - times.begin()) - 1;
        double size;
        if (const auto* cp = std::get_if<CompoundPoissonJumps>(&jumps_.spec()))
            size = std::visit(draw, cp->sizes);
        else
            size = draw(std::get<TruncatedStableJumps>(jumps_.spec()));
        out[std::min(i, out.size() - 1)] += size;
    }
}

void IncrementSimulator::fill_jumps(std::uint64_t seed, std::span<double> out) const {
    if (out.size() != scheme_.size()) throw ParameterError("increment buffer size does not match scheme");
    std::fill(out.begin(), out.end(), 0.0);
    add_jumps(seed, out);
}

void IncrementSimulator::fill(std::uint64_t seed, std::span<double> out) const {
    fill_continuous(seed, out);
    add_jumps(seed, out);
}

PathIncrements IncrementSimulator::simulate(std::uint64_t seed) const {
    PathIncrements p{scheme_, std::vector<double>(scheme_.size()), seed, std::nullopt};
    fill(seed, p.dx);
    return p;
}

PathIncrements simulate_increments(const VolatilityModel& vol, const DriftSpec& drift, const JumpSpec& jumps,
                                   const SamplingScheme& scheme, std::uint64_t seed,
                                   std::optional<std::uint64_t> sigma_seed, int substeps) {
    if (substeps < 1) throw ParameterError("simulate_increments: substeps must be >= 1");
    IncrementSimulator sim(vol.realize(sigma_seed), drift, jumps, scheme, substeps);
    auto p = sim.simulate(seed);
    p.sigma_seed = sigma_seed;
    return p;
}

void write_increments_csv(const std::string& path, const PathIncrements& p,
                          std::span<const std::string> header_comments) {
    CsvTable table;
    table.comments.assign(header_comments.begin(), header_comments.end());
    table.header = {"i", "t_start", "t_end", "dx"};
    const auto times = p.scheme.times();
    for (std::size_t i = 0; i < p.dx.size(); ++i)
        table.add_row({std::to_string(i + 1), format_double(times[i]), format_double(times[i + 1]),
                       format_double(p.dx[i])});
    table.write(path);
}

PathIncrements read_increments_csv(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open increments file: " + path);
    std::vector<double> times{0.0};
    std::vector<double> dx;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("i,t_start,t_end,dx", 0) != 0)
                throw ParameterError("increments file must have header i,t_start,t_end,dx");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<double> values;
        while (std::getline(row, field, ',')) values.push_back(std::stod(field));
        if (values.size() != 4) throw ParameterError("malformed increments row: " + line);
        if (values[1] != times.back()) throw ParameterError("increments rows are not contiguous in time");
        times.push_back(values[2]);
        dx.push_back(values[3]);
    }
    if (dx.empty()) throw ParameterError("increments file has no rows");
    const std::size_t nominal = n == 0 ? dx.size() : n;
    return PathIncrements{SamplingScheme::irregular(std::move(times), nominal), std::move(dx), 0, std::nullopt};
}

}  // namespace erltv

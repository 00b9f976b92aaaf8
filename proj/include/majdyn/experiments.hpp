#ifndef MAJDYN_EXPERIMENTS_HPP
#define MAJDYN_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace majdyn {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kVersionString = "majdyn 0.1.0";

/// Two-sided normal 95% interval for a sample mean.
struct MeanCI {
    double estimate;
    double half_width;
    double lo;
    double hi;
    std::int64_t n;
};
MeanCI mean_ci(std::span<const double> samples, double z = 1.96);

/// Wald (normal-approximation) interval for a proportion.
struct PropCI {
    double fraction;
    double half_width;
    double lo;
    double hi;
    std::int64_t successes;
    std::int64_t trials;
};
PropCI proportion_ci(std::int64_t successes, std::int64_t trials, double z = 1.96);

/// One gated threshold with its provenance (formula + inputs), so reports
/// carry no unexplained constants.
struct Gate {
    std::string name;
    std::string comparison; // ">=", "<=", "in", "all"
    double value;
    double threshold;
    bool passed;
    ordered_json provenance;
};

struct ExperimentReport {
    std::string id;
    ordered_json config;  // resolved parameters, sufficient for exact replay
    ordered_json results;
    std::vector<Gate> gates;
    ordered_json trial_records = ordered_json::array();
    bool regime_ok = true;
    std::string regime_note;
    double wall_clock_seconds = 0.0;

    bool passed() const;
    ordered_json to_json() const;
};

/// Runs `fn(trial)` for trial = 0..trials-1 on `workers` threads (0 = number
/// of hardware threads). Trials draw from disjoint rng streams, so results
/// are identical for every worker count. The first exception by trial index
/// is rethrown.
void parallel_trials(std::int64_t trials, int workers,
                     const std::function<void(std::int64_t)>& fn);

/// Stream ids: trial t, role r -> t * 8 + r. Roles: 0 graph, 1 opinions,
/// 2 percolation, 3 spectral, 4 subsets.
inline std::uint64_t trial_stream(std::int64_t trial, int role) {
    return static_cast<std::uint64_t>(trial) * 8 + static_cast<std::uint64_t>(role);
}

std::vector<std::string> experiment_ids();

/// Dispatch on config["experiment"]; missing parameters take documented
/// defaults, unknown keys are rejected. Throws std::invalid_argument for an
/// unknown id.
ExperimentReport run_experiment(const ordered_json& config);

} // namespace majdyn

#endif

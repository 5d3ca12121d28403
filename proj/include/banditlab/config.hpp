#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "banditlab/env.hpp"
#include "banditlab/policies.hpp"
#include "banditlab/trial.hpp"

namespace banditlab {

// Any configuration problem the CLI should report with exit code 2. The
// message carries a section.key field path where one applies.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Benchmark parameters tuned per (arm count, sigma) cell; `auto` parameter
// resolution reads from this table.
struct TunedParams {
    double epsilon;
    double tau;
    double pursuit_beta;
    double rc_alpha;
    double rc_beta;
};

// Returns the pre-tuned parameters for the canonical grid cell nearest to
// (arm_count, sigma).
TunedParams tuned_params(std::size_t arm_count, double sigma);

// Builds a policy configuration by algorithm name, drawing parameter values
// from `params`. Throws ConfigError on an unknown name.
PolicyConfig make_policy_config(const std::string& algorithm, const TunedParams& params);

const std::vector<std::string>& all_algorithm_names();

struct BenchConfig {
    std::size_t horizon = 1000;
    std::size_t repetitions = 1000;
    RewardFamily family = RewardFamily::Normal;
    MeanSamplingMode mean_mode = MeanSamplingMode::UniformOn01;
    std::vector<std::size_t> arm_counts = {2, 5, 10, 50};
    std::vector<double> sigmas = {0.01, 0.1, 1.0};
    std::vector<std::string> algorithms = all_algorithm_names();
    // NaN = resolve from the tuned table per cell.
    double epsilon = NAN;
    double tau = NAN;
    double pursuit_beta = NAN;
    double rc_alpha = NAN;
    double rc_beta = NAN;

    TunedParams resolve_params(std::size_t arm_count, double sigma) const;
};

struct TuneConfig {
    std::string algorithm = "softmax";
    std::size_t arm_count = 10;
    double sigma = 0.1;
    std::vector<double> grid = {0.0007, 0.001, 0.005, 0.01, 0.05, 0.1};
    std::size_t horizon = 1000;
    std::size_t repetitions = 1000;
    RewardFamily family = RewardFamily::Normal;
    MeanSamplingMode mean_mode = MeanSamplingMode::UniformOn01;
};

struct TrialRunConfig {
    std::size_t patient_count = 360;
    std::size_t accrual_weeks = 30;
    int feedback_delay_days = 14;
    std::size_t repetitions = 1000;
    std::vector<std::string> strategies = {"randomization", "epsilon_greedy",
                                           "softmax", "ucb1", "ucb1_tuned"};
    // Trial-specific bandit parameters (the benchmark tuning grid does not
    // transfer to the delayed two-arm Bernoulli setting).
    double epsilon = 0.075;
    double tau = 0.125;
    double pursuit_beta = 0.05;
    double rc_alpha = 0.1;
    double rc_beta = 0.98;
    double randomization_bupnal = 1.0;
    double randomization_clon = 1.0;
    std::size_t synthetic_size_per_arm = 1000;

    AllocationStrategy make_strategy(const std::string& name) const;
};

struct AppConfig {
    BenchConfig bench;
    TuneConfig tune;
    TrialRunConfig trial;
};

// Parses the sectioned key/value config format. Unknown sections or keys
// and malformed values raise ConfigError with a field path.
AppConfig parse_config(std::istream& in);
AppConfig parse_config_file(const std::string& path);

}  // namespace banditlab

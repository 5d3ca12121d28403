#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "banditlab/env.hpp"
#include "banditlab/policies.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

struct UndefinedBound : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// One benchmark cell: which policy, on what kind of bandit, for how long.
struct ExperimentConfig {
    std::size_t arm_count = 10;
    double variance = 0.01;  // sigma^2
    RewardFamily family = RewardFamily::Normal;
    MeanSamplingMode mean_mode = MeanSamplingMode::UniformOn01;
    std::size_t horizon = 1000;
    std::size_t repetitions = 1000;
    PolicyConfig policy = Softmax{0.1};
    std::uint64_t master_seed = 0;
    unsigned threads = 1;

    void validate() const;
};

// Everything observed in one horizon-long run.
struct RunMetrics {
    std::vector<double> per_turn_regret;   // mu* - mu_{j(t)}
    std::vector<std::uint8_t> optimal_play;
    std::vector<std::uint64_t> play_counts;

    double total_regret() const {
        return std::accumulate(per_turn_regret.begin(), per_turn_regret.end(), 0.0);
    }
    std::vector<double> cumulative_regret() const;
};

struct AggregateMetrics {
    double mean_total_regret = 0.0;
    double std_error_total_regret = 0.0;
    std::vector<double> regret_curve;            // mean per-turn regret
    std::vector<double> optimal_fraction_curve;  // fraction of optimal plays
};

// Plays `policy` against `instance` for `horizon` turns. Regret increments
// use the true means, not the realized rewards.
template <typename PolicyLike>
RunMetrics run_single(const BanditInstance& instance, PolicyLike& policy,
                      std::size_t horizon, Rng& rng) {
    RunMetrics metrics;
    metrics.per_turn_regret.resize(horizon);
    metrics.optimal_play.resize(horizon);
    metrics.play_counts.assign(instance.arm_count(), 0);
    for (std::size_t t = 0; t < horizon; ++t) {
        std::size_t arm = policy.select(rng);
        double reward = instance.sample_reward(arm, rng);
        policy.observe(arm, reward, rng);
        metrics.per_turn_regret[t] = instance.gaps()[arm];
        metrics.optimal_play[t] =
            instance.means()[arm] == instance.best_mean() ? 1 : 0;
        ++metrics.play_counts[arm];
    }
    return metrics;
}

// Runs config.repetitions independent repetitions, drawing fresh means each
// time, and averages. Deterministic for a fixed master seed regardless of
// the thread count: each repetition gets a derived stream and aggregation
// runs in repetition order.
AggregateMetrics run_experiment(const ExperimentConfig& config);

struct TuneResult {
    double best_value = 0.0;
    std::vector<std::pair<double, double>> table;  // (parameter, mean total regret)
};

// Evaluates run_experiment for each parameter value in the grid; ties are
// broken toward the smaller parameter. `apply` installs a grid value into
// the config's policy (e.g. sets tau).
TuneResult tune(const ExperimentConfig& config, const std::vector<double>& grid,
                PolicyConfig (*apply)(const PolicyConfig&, double));

// Lai-Robbins asymptotic reference curve at the given turn:
// sum over suboptimal arms of gap * ln(turn) / KL(arm || best).
// Supported families: Normal (equal variances) and Bernoulli.
double lai_robbins_bound(const BanditInstance& instance, std::uint64_t turn);

}  // namespace banditlab

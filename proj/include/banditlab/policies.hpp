#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

struct InvalidConfiguration : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Running per-arm statistics: pull count, incremental mean and sum of
// squared rewards (for the variance estimate used by UCB1-Tuned).
struct ArmStats {
    std::uint64_t pull_count = 0;
    double empirical_mean = 0.0;
    double sum_of_squares = 0.0;

    // Population-form variance estimate, clamped at zero against rounding.
    double variance() const {
        if (pull_count == 0) return 0.0;
        double v = sum_of_squares / static_cast<double>(pull_count) -
                   empirical_mean * empirical_mean;
        return v > 0.0 ? v : 0.0;
    }
};

// The first real observation replaces the configured initial (optimistic)
// mean; afterwards the mean is updated incrementally.
void update_arm_stats(ArmStats& stats, double reward);

// Max-shifted Boltzmann distribution over the given values.
std::vector<double> softmax_probabilities(std::span<const double> values, double tau);

// UCB1 index: mean + sqrt(2 ln t / n). Requires n >= 1, t >= 1.
double ucb1_index(double empirical_mean, std::uint64_t pull_count, std::uint64_t turn);

// UCB1-Tuned index: mean + sqrt(ln t / n * min(1/4, V)) where
// V = variance + sqrt(2 ln t / n).
double ucb1_tuned_index(double empirical_mean, double variance_estimate,
                        std::uint64_t pull_count, std::uint64_t turn);

struct EpsilonGreedy {
    double epsilon;
};
struct Softmax {
    double tau;
};
struct Pursuit {
    double beta;
};
struct ReinforcementComparison {
    double alpha;
    double beta;
};
struct Ucb1 {};
struct Ucb1Tuned {};

using PolicyConfig = std::variant<EpsilonGreedy, Softmax, Pursuit,
                                  ReinforcementComparison, Ucb1, Ucb1Tuned>;

std::string policy_name(const PolicyConfig& config);

// One bandit policy instance: selection rule plus the state it maintains.
// A Policy is a plain value; one instance is driven by one run at a time.
class Policy {
public:
    // Throws InvalidConfiguration on an empty arm set or out-of-range
    // parameters (epsilon in [0,1], tau > 0, beta/alpha in (0,1)).
    Policy(PolicyConfig config, std::size_t arm_count, double initial_mean = 1.0);

    std::size_t arm_count() const { return per_arm_.size(); }
    std::uint64_t turn() const { return turn_; }
    const std::vector<ArmStats>& arms() const { return per_arm_; }
    const PolicyConfig& config() const { return config_; }

    // Pursuit probability simplex (only meaningful for Pursuit).
    const std::vector<double>& pursuit_probs() const { return probs_; }
    const std::vector<double>& preferences() const { return preferences_; }
    double mean_reward_baseline() const { return mean_reward_; }

    // Picks the next arm. The rng is also used for tie-breaking.
    std::size_t select(Rng& rng) const;

    // Applies an observed reward for a previously selected arm. Pursuit
    // recomputes its simplex here, so an rng is needed for greedy
    // tie-breaking.
    void observe(std::size_t arm, double reward, Rng& rng);

    // The per-arm selection distribution implied by the current state.
    std::vector<double> selection_probabilities() const;

private:
    std::size_t greedy_arm(Rng& rng) const;

    PolicyConfig config_;
    std::vector<ArmStats> per_arm_;
    std::uint64_t turn_ = 0;

    std::vector<double> probs_;        // Pursuit
    std::vector<double> preferences_;  // Reinforcement comparison
    double mean_reward_ = 0.0;         // Reinforcement comparison baseline
};

// Uniformly random index among the maxima of `values`.
std::size_t argmax_random_tie(std::span<const double> values, Rng& rng);

// Samples an index from a probability vector.
std::size_t sample_discrete(std::span<const double> probs, Rng& rng);

}  // namespace banditlab

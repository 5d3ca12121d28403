#include "banditlab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace banditlab {

void update_arm_stats(ArmStats& stats, double reward) {
    if (stats.pull_count == 0) {
        // The optimistic prior is replaced, not averaged in.
        stats.empirical_mean = reward;
    } else {
        double n = static_cast<double>(stats.pull_count);
        stats.empirical_mean += (reward - stats.empirical_mean) / (n + 1.0);
    }
    ++stats.pull_count;
    stats.sum_of_squares += reward * reward;
}

std::vector<double> softmax_probabilities(std::span<const double> values, double tau) {
    if (tau <= 0.0) throw InvalidConfiguration("softmax temperature must be > 0");
    if (values.empty()) throw InvalidConfiguration("softmax over empty value set");
    double max_v = *std::max_element(values.begin(), values.end());
    std::vector<double> probs(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        probs[i] = std::exp((values[i] - max_v) / tau);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

double ucb1_index(double empirical_mean, std::uint64_t pull_count, std::uint64_t turn) {
    if (pull_count == 0)
        throw InvalidConfiguration("ucb1_index requires at least one pull");
    double n = static_cast<double>(pull_count);
    double t = static_cast<double>(turn);
    return empirical_mean + std::sqrt(2.0 * std::log(t) / n);
}

double ucb1_tuned_index(double empirical_mean, double variance_estimate,
                        std::uint64_t pull_count, std::uint64_t turn) {
    if (pull_count == 0)
        throw InvalidConfiguration("ucb1_tuned_index requires at least one pull");
    double n = static_cast<double>(pull_count);
    double log_t = std::log(static_cast<double>(turn));
    double v = variance_estimate + std::sqrt(2.0 * log_t / n);
    return empirical_mean + std::sqrt(log_t / n * std::min(0.25, v));
}

std::string policy_name(const PolicyConfig& config) {
    struct Visitor {
        std::string operator()(const EpsilonGreedy&) const { return "epsilon_greedy"; }
        std::string operator()(const Softmax&) const { return "softmax"; }
        std::string operator()(const Pursuit&) const { return "pursuit"; }
        std::string operator()(const ReinforcementComparison&) const {
            return "reinforcement_comparison";
        }
        std::string operator()(const Ucb1&) const { return "ucb1"; }
        std::string operator()(const Ucb1Tuned&) const { return "ucb1_tuned"; }
    };
    return std::visit(Visitor{}, config);
}

std::size_t argmax_random_tie(std::span<const double> values, Rng& rng) {
    double best = -std::numeric_limits<double>::infinity();
    for (double v : values) best = std::max(best, v);
    std::size_t ties = 0;
    for (double v : values)
        if (v == best) ++ties;
    if (ties == 1) {
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] == best) return i;
    }
    std::size_t pick = rng.uniform_index(ties);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == best && pick-- == 0) return i;
    }
    return values.size() - 1;  // unreachable
}

std::size_t sample_discrete(std::span<const double> probs, Rng& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

namespace {

void validate(const PolicyConfig& config) {
    if (const auto* eg = std::get_if<EpsilonGreedy>(&config)) {
        if (eg->epsilon < 0.0 || eg->epsilon > 1.0)
            throw InvalidConfiguration("epsilon must lie in [0,1]");
    } else if (const auto* sm = std::get_if<Softmax>(&config)) {
        if (sm->tau <= 0.0) throw InvalidConfiguration("tau must be > 0");
    } else if (const auto* p = std::get_if<Pursuit>(&config)) {
        if (p->beta <= 0.0 || p->beta >= 1.0)
            throw InvalidConfiguration("pursuit beta must lie in (0,1)");
    } else if (const auto* rc = std::get_if<ReinforcementComparison>(&config)) {
        if (rc->alpha <= 0.0 || rc->alpha >= 1.0)
            throw InvalidConfiguration("reinforcement comparison alpha must lie in (0,1)");
        if (rc->beta <= 0.0 || rc->beta >= 1.0)
            throw InvalidConfiguration("reinforcement comparison beta must lie in (0,1)");
    }
}

}  // namespace

Policy::Policy(PolicyConfig config, std::size_t arm_count, double initial_mean)
    : config_(std::move(config)) {
    if (arm_count == 0) throw InvalidConfiguration("policy needs at least one arm");
    validate(config_);
    per_arm_.resize(arm_count);
    for (ArmStats& s : per_arm_) s.empirical_mean = initial_mean;
    if (std::holds_alternative<Pursuit>(config_))
        probs_.assign(arm_count, 1.0 / static_cast<double>(arm_count));
    if (std::holds_alternative<ReinforcementComparison>(config_))
        preferences_.assign(arm_count, 0.0);
}

std::size_t Policy::greedy_arm(Rng& rng) const {
    std::vector<double> means(per_arm_.size());
    for (std::size_t i = 0; i < per_arm_.size(); ++i)
        means[i] = per_arm_[i].empirical_mean;
    return argmax_random_tie(means, rng);
}

std::size_t Policy::select(Rng& rng) const {
    struct Visitor {
        const Policy& self;
        Rng& rng;

        std::size_t operator()(const EpsilonGreedy& eg) const {
            if (eg.epsilon > 0.0 && rng.uniform() < eg.epsilon)
                return rng.uniform_index(self.per_arm_.size());
            return self.greedy_arm(rng);
        }
        std::size_t operator()(const Softmax& sm) const {
            std::vector<double> means(self.per_arm_.size());
            for (std::size_t i = 0; i < means.size(); ++i)
                means[i] = self.per_arm_[i].empirical_mean;
            return sample_discrete(softmax_probabilities(means, sm.tau), rng);
        }
        std::size_t operator()(const Pursuit&) const {
            return sample_discrete(self.probs_, rng);
        }
        std::size_t operator()(const ReinforcementComparison&) const {
            return sample_discrete(softmax_probabilities(self.preferences_, 1.0), rng);
        }
        std::size_t operator()(const Ucb1&) const { return ucb_select(false); }
        std::size_t operator()(const Ucb1Tuned&) const { return ucb_select(true); }

        std::size_t ucb_select(bool tuned) const {
            // Initialization phase: every arm is played once, in index order.
            for (std::size_t i = 0; i < self.per_arm_.size(); ++i)
                if (self.per_arm_[i].pull_count == 0) return i;
            std::vector<double> indices(self.per_arm_.size());
            for (std::size_t i = 0; i < indices.size(); ++i) {
                const ArmStats& s = self.per_arm_[i];
                indices[i] = tuned
                                 ? ucb1_tuned_index(s.empirical_mean, s.variance(),
                                                    s.pull_count, self.turn_)
                                 : ucb1_index(s.empirical_mean, s.pull_count, self.turn_);
            }
            return argmax_random_tie(indices, rng);
        }
    };
    return std::visit(Visitor{*this, rng}, config_);
}

void Policy::observe(std::size_t arm, double reward, Rng& rng) {
    if (arm >= per_arm_.size()) throw std::out_of_range("arm index out of range");
    if (const auto* rc = std::get_if<ReinforcementComparison>(&config_)) {
        // Preference update uses the baseline from before this reward.
        preferences_[arm] += rc->beta * (reward - mean_reward_);
        mean_reward_ = (1.0 - rc->alpha) * mean_reward_ + rc->alpha * reward;
    }
    update_arm_stats(per_arm_[arm], reward);
    ++turn_;
    if (const auto* p = std::get_if<Pursuit>(&config_)) {
        std::size_t greedy = greedy_arm(rng);
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            double target = (i == greedy) ? 1.0 : 0.0;
            probs_[i] += p->beta * (target - probs_[i]);
        }
    }
}

std::vector<double> Policy::selection_probabilities() const {
    const std::size_t k = per_arm_.size();
    std::vector<double> means(k);
    for (std::size_t i = 0; i < k; ++i) means[i] = per_arm_[i].empirical_mean;

    struct Visitor {
        const Policy& self;
        const std::vector<double>& means;

        std::vector<double> operator()(const EpsilonGreedy& eg) const {
            const std::size_t k = means.size();
            double best = *std::max_element(means.begin(), means.end());
            std::size_t ties = 0;
            for (double m : means)
                if (m == best) ++ties;
            std::vector<double> probs(k, eg.epsilon / static_cast<double>(k));
            for (std::size_t i = 0; i < k; ++i)
                if (means[i] == best)
                    probs[i] += (1.0 - eg.epsilon) / static_cast<double>(ties);
            return probs;
        }
        std::vector<double> operator()(const Softmax& sm) const {
            return softmax_probabilities(means, sm.tau);
        }
        std::vector<double> operator()(const Pursuit&) const { return self.probs_; }
        std::vector<double> operator()(const ReinforcementComparison&) const {
            return softmax_probabilities(self.preferences_, 1.0);
        }
        std::vector<double> operator()(const Ucb1&) const { return ucb_probs(false); }
        std::vector<double> operator()(const Ucb1Tuned&) const { return ucb_probs(true); }

        std::vector<double> ucb_probs(bool tuned) const {
            const std::size_t k = means.size();
            std::vector<double> probs(k, 0.0);
            for (std::size_t i = 0; i < k; ++i) {
                if (self.per_arm_[i].pull_count == 0) {
                    probs[i] = 1.0;
                    return probs;
                }
            }
            std::vector<double> indices(k);
            for (std::size_t i = 0; i < k; ++i) {
                const ArmStats& s = self.per_arm_[i];
                indices[i] = tuned
                                 ? ucb1_tuned_index(s.empirical_mean, s.variance(),
                                                    s.pull_count, self.turn_)
                                 : ucb1_index(s.empirical_mean, s.pull_count, self.turn_);
            }
            double best = *std::max_element(indices.begin(), indices.end());
            std::size_t ties = 0;
            for (double v : indices)
                if (v == best) ++ties;
            for (std::size_t i = 0; i < k; ++i)
                if (indices[i] == best) probs[i] = 1.0 / static_cast<double>(ties);
            return probs;
        }
    };
    return std::visit(Visitor{*this, means}, config_);
}

}  // namespace banditlab

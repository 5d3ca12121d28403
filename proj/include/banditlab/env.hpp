#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

struct UnsupportedConfiguration : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class RewardFamily {
    Normal,
    Uniform,
    Triangular,
    InverseGaussian,
    Gumbel,
    Bernoulli,
};

RewardFamily reward_family_from_name(const std::string& name);
std::string reward_family_name(RewardFamily family);

// How the true arm means are drawn for each repetition.
enum class MeanSamplingMode {
    UniformOn01,
    NormalAround05,
};

// Family-specific parameters matched to a requested (mean, variance).
struct NormalParams {
    double mean, stddev;
};
struct UniformParams {
    double lo, hi;
};
struct TriangularParams {
    double lo, mode, hi;
};
struct InverseGaussianParams {
    double mean, shape;
};
struct GumbelParams {
    double location, scale;
};
struct BernoulliParams {
    double p;
};

using DistributionParams =
    std::variant<NormalParams, UniformParams, TriangularParams,
                 InverseGaussianParams, GumbelParams, BernoulliParams>;

// Moment matching: returns parameters whose distribution has exactly the
// requested mean and variance (Bernoulli keeps the mean; its variance is
// forced to p(1-p)).
DistributionParams distribution_params(RewardFamily family, double mean,
                                       double variance);

double sample_distribution(const DistributionParams& params, Rng& rng);

// An immutable bandit problem instance: K arms sharing one variance and
// reward family, each with its own true mean in [0,1].
class BanditInstance {
public:
    BanditInstance(std::vector<double> means, double variance, RewardFamily family);

    std::size_t arm_count() const { return means_.size(); }
    const std::vector<double>& means() const { return means_; }
    double variance() const { return variance_; }
    RewardFamily family() const { return family_; }
    double best_mean() const { return best_mean_; }
    const std::vector<double>& gaps() const { return gaps_; }
    std::size_t best_arm() const { return best_arm_; }

    double sample_reward(std::size_t arm, Rng& rng) const;

private:
    std::vector<double> means_;
    double variance_;
    RewardFamily family_;
    double best_mean_;
    std::size_t best_arm_;
    std::vector<double> gaps_;
    std::vector<DistributionParams> arm_params_;
};

// Draws arm_count true means in [0,1]. NormalAround05 is centered at 0.5
// with the variance of U(0,1) (1/12); out-of-range draws are resampled.
std::vector<double> sample_means(std::size_t arm_count, MeanSamplingMode mode,
                                 Rng& rng);

}  // namespace banditlab

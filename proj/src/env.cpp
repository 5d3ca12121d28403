#include "banditlab/env.hpp"

#include <algorithm>
#include <cmath>

namespace banditlab {

namespace {

constexpr double kEulerMascheroni = 0.5772156649015328606;
constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

RewardFamily reward_family_from_name(const std::string& name) {
    if (name == "normal") return RewardFamily::Normal;
    if (name == "uniform") return RewardFamily::Uniform;
    if (name == "triangular") return RewardFamily::Triangular;
    if (name == "inverse_gaussian") return RewardFamily::InverseGaussian;
    if (name == "gumbel") return RewardFamily::Gumbel;
    if (name == "bernoulli") return RewardFamily::Bernoulli;
    throw UnsupportedConfiguration("unknown reward family: " + name);
}

std::string reward_family_name(RewardFamily family) {
    switch (family) {
        case RewardFamily::Normal: return "normal";
        case RewardFamily::Uniform: return "uniform";
        case RewardFamily::Triangular: return "triangular";
        case RewardFamily::InverseGaussian: return "inverse_gaussian";
        case RewardFamily::Gumbel: return "gumbel";
        case RewardFamily::Bernoulli: return "bernoulli";
    }
    throw UnsupportedConfiguration("unknown reward family");
}

DistributionParams distribution_params(RewardFamily family, double mean,
                                       double variance) {
    if (variance <= 0.0 && family != RewardFamily::Bernoulli)
        throw UnsupportedConfiguration("variance must be > 0");
    double sigma = std::sqrt(variance);
    switch (family) {
        case RewardFamily::Normal:
            return NormalParams{mean, sigma};
        case RewardFamily::Uniform: {
            double half = std::sqrt(3.0) * sigma;  // Var = (hi-lo)^2 / 12
            return UniformParams{mean - half, mean + half};
        }
        case RewardFamily::Triangular: {
            double half = std::sqrt(6.0) * sigma;  // symmetric, Var = w^2 / 6
            return TriangularParams{mean - half, mean, mean + half};
        }
        case RewardFamily::InverseGaussian: {
            if (mean <= 0.0)
                throw UnsupportedConfiguration(
                    "inverse Gaussian requires a positive mean");
            double shape = mean * mean * mean / variance;  // Var = mu^3 / lambda
            return InverseGaussianParams{mean, shape};
        }
        case RewardFamily::Gumbel: {
            double scale = sigma * std::sqrt(6.0) / kPi;
            return GumbelParams{mean - kEulerMascheroni * scale, scale};
        }
        case RewardFamily::Bernoulli:
            if (mean < 0.0 || mean > 1.0)
                throw UnsupportedConfiguration("Bernoulli mean must lie in [0,1]");
            return BernoulliParams{mean};
    }
    throw UnsupportedConfiguration("unknown reward family");
}

double sample_distribution(const DistributionParams& params, Rng& rng) {
    struct Visitor {
        Rng& rng;

        double operator()(const NormalParams& p) const {
            return rng.normal(p.mean, p.stddev);
        }
        double operator()(const UniformParams& p) const {
            return rng.uniform(p.lo, p.hi);
        }
        double operator()(const TriangularParams& p) const {
            double u = rng.uniform();
            double range = p.hi - p.lo;
            double cut = (p.mode - p.lo) / range;
            if (u < cut)
                return p.lo + std::sqrt(u * range * (p.mode - p.lo));
            return p.hi - std::sqrt((1.0 - u) * range * (p.hi - p.mode));
        }
        double operator()(const InverseGaussianParams& p) const {
            // Michael, Schucany & Haas transformation.
            double nu = rng.normal();
            double y = nu * nu;
            double mu = p.mean, lambda = p.shape;
            double x = mu + mu * mu * y / (2.0 * lambda) -
                       mu / (2.0 * lambda) *
                           std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
            if (rng.uniform() <= mu / (mu + x)) return x;
            return mu * mu / x;
        }
        double operator()(const GumbelParams& p) const {
            double u;
            do {
                u = rng.uniform();
            } while (u <= 0.0);
            return p.location - p.scale * std::log(-std::log(u));
        }
        double operator()(const BernoulliParams& p) const {
            return rng.bernoulli(p.p) ? 1.0 : 0.0;
        }
    };
    return std::visit(Visitor{rng}, params);
}

BanditInstance::BanditInstance(std::vector<double> means, double variance,
                               RewardFamily family)
    : means_(std::move(means)), variance_(variance), family_(family) {
    if (means_.empty())
        throw UnsupportedConfiguration("bandit instance needs at least one arm");
    if (variance_ <= 0.0 && family_ != RewardFamily::Bernoulli)
        throw UnsupportedConfiguration("reward variance must be > 0");
    best_arm_ = static_cast<std::size_t>(
        std::max_element(means_.begin(), means_.end()) - means_.begin());
    best_mean_ = means_[best_arm_];
    gaps_.resize(means_.size());
    arm_params_.reserve(means_.size());
    for (std::size_t i = 0; i < means_.size(); ++i) {
        gaps_[i] = best_mean_ - means_[i];
        arm_params_.push_back(distribution_params(family_, means_[i], variance_));
    }
}

double BanditInstance::sample_reward(std::size_t arm, Rng& rng) const {
    if (arm >= means_.size()) throw std::out_of_range("arm index out of range");
    return sample_distribution(arm_params_[arm], rng);
}

std::vector<double> sample_means(std::size_t arm_count, MeanSamplingMode mode,
                                 Rng& rng) {
    if (arm_count == 0)
        throw UnsupportedConfiguration("arm_count must be >= 1");
    std::vector<double> means(arm_count);
    const double stddev = std::sqrt(1.0 / 12.0);
    for (double& m : means) {
        if (mode == MeanSamplingMode::UniformOn01) {
            m = rng.uniform();
        } else {
            do {
                m = rng.normal(0.5, stddev);
            } while (m < 0.0 || m > 1.0);
        }
    }
    return means;
}

}  // namespace banditlab

#include "banditlab/harness.hpp"

#include <cmath>
#include <thread>

namespace banditlab {

namespace {

// Runs fn(i) for i in [0, n) across `threads` workers. Work is striped so
// results must be written to indexed storage by the callers.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += threads) fn(i);
        });
    }
    for (std::thread& t : workers) t.join();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (arm_count == 0) throw InvalidConfiguration("arm_count must be >= 1");
    if (repetitions == 0) throw InvalidConfiguration("repetitions must be >= 1");
    if (horizon < arm_count)
        throw InvalidConfiguration(
            "horizon must be >= arm_count (UCB initialization must fit)");
}

std::vector<double> RunMetrics::cumulative_regret() const {
    std::vector<double> cum(per_turn_regret.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < per_turn_regret.size(); ++t) {
        acc += per_turn_regret[t];
        cum[t] = acc;
    }
    return cum;
}

AggregateMetrics run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::size_t reps = config.repetitions;
    std::vector<RunMetrics> results(reps);

    parallel_for(reps, config.threads, [&](std::size_t r) {
        Rng rng(derive_seed(config.master_seed, {kBenchStream, r}));
        std::vector<double> means =
            sample_means(config.arm_count, config.mean_mode, rng);
        BanditInstance instance(std::move(means), config.variance, config.family);
        Policy policy(config.policy, config.arm_count);
        results[r] = run_single(instance, policy, config.horizon, rng);
    });

    AggregateMetrics agg;
    agg.regret_curve.assign(config.horizon, 0.0);
    agg.optimal_fraction_curve.assign(config.horizon, 0.0);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        const RunMetrics& m = results[r];
        for (std::size_t t = 0; t < config.horizon; ++t) {
            agg.regret_curve[t] += m.per_turn_regret[t];
            agg.optimal_fraction_curve[t] += m.optimal_play[t];
        }
        double total = m.total_regret();
        sum += total;
        sum_sq += total * total;
    }
    const double n = static_cast<double>(reps);
    for (std::size_t t = 0; t < config.horizon; ++t) {
        agg.regret_curve[t] /= n;
        agg.optimal_fraction_curve[t] /= n;
    }
    agg.mean_total_regret = sum / n;
    if (reps > 1) {
        double var = (sum_sq - sum * sum / n) / (n - 1.0);
        agg.std_error_total_regret = std::sqrt(std::max(var, 0.0) / n);
    }
    return agg;
}

TuneResult tune(const ExperimentConfig& config, const std::vector<double>& grid,
                PolicyConfig (*apply)(const PolicyConfig&, double)) {
    if (grid.empty()) throw InvalidConfiguration("tuning grid must be nonempty");
    TuneResult result;
    result.table.reserve(grid.size());
    double best_regret = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        ExperimentConfig cell = config;
        cell.policy = apply(config.policy, grid[g]);
        cell.master_seed = derive_seed(config.master_seed, {kTuneStream, g});
        AggregateMetrics agg = run_experiment(cell);
        result.table.emplace_back(grid[g], agg.mean_total_regret);
        bool better = result.table.size() == 1 ||
                      agg.mean_total_regret < best_regret ||
                      (agg.mean_total_regret == best_regret &&
                       grid[g] < result.best_value);
        if (better) {
            best_regret = agg.mean_total_regret;
            result.best_value = grid[g];
        }
    }
    return result;
}

double lai_robbins_bound(const BanditInstance& instance, std::uint64_t turn) {
    if (turn == 0) throw UndefinedBound("turn must be >= 1");
    double log_t = std::log(static_cast<double>(turn));
    double bound = 0.0;
    for (std::size_t i = 0; i < instance.arm_count(); ++i) {
        double gap = instance.gaps()[i];
        if (gap == 0.0) continue;
        double mu = instance.means()[i];
        double best = instance.best_mean();
        double kl;
        switch (instance.family()) {
            case RewardFamily::Normal:
                kl = gap * gap / (2.0 * instance.variance());
                break;
            case RewardFamily::Bernoulli: {
                if (mu <= 0.0 || mu >= 1.0 || best <= 0.0 || best >= 1.0)
                    throw UndefinedBound(
                        "Bernoulli KL undefined for degenerate means");
                kl = mu * std::log(mu / best) +
                     (1.0 - mu) * std::log((1.0 - mu) / (1.0 - best));
                break;
            }
            default:
                throw UnsupportedConfiguration(
                    "Lai-Robbins bound supports normal and Bernoulli rewards only");
        }
        if (kl <= 0.0) throw UndefinedBound("zero KL divergence for a suboptimal arm");
        bound += gap * log_t / kl;
    }
    return bound;
}

}  // namespace banditlab

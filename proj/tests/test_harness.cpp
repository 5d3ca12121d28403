#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "banditlab/harness.hpp"

using namespace banditlab;

namespace {

// Policy stub that always plays a fixed arm.
struct FixedArmPolicy {
    std::size_t arm;
    std::size_t select(Rng&) const { return arm; }
    void observe(std::size_t, double, Rng&) {}
};

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig config;
    config.arm_count = 10;
    config.horizon = 5;  // shorter than the UCB warm-up
    config.policy = Ucb1{};
    CHECK_THROWS_AS(config.validate(), InvalidConfiguration);
    config.horizon = 10;
    CHECK_NOTHROW(config.validate());
    config.repetitions = 0;
    CHECK_THROWS_AS(config.validate(), InvalidConfiguration);
}

TEST_CASE("single-arm bandit has zero regret") {
    BanditInstance instance({0.7}, 0.01, RewardFamily::Normal);
    Policy policy(EpsilonGreedy{0.1}, 1);
    Rng rng(3);
    RunMetrics metrics = run_single(instance, policy, 500, rng);
    CHECK(metrics.total_regret() == 0.0);
    CHECK(metrics.play_counts[0] == 500);
}

TEST_CASE("equal means: zero regret, every play optimal") {
    BanditInstance instance({0.4, 0.4, 0.4}, 0.01, RewardFamily::Normal);
    Policy policy(Softmax{0.1}, 3);
    Rng rng(5);
    RunMetrics metrics = run_single(instance, policy, 300, rng);
    CHECK(metrics.total_regret() == 0.0);
    for (std::uint8_t b : metrics.optimal_play) CHECK(b == 1);
}

TEST_CASE("a policy pinned to the worst arm accrues gap * horizon") {
    BanditInstance instance({0.9, 0.3}, 0.01, RewardFamily::Normal);
    FixedArmPolicy stub{1};
    Rng rng(7);
    RunMetrics metrics = run_single(instance, stub, 250, rng);
    CHECK(metrics.total_regret() == doctest::Approx(250 * 0.6).epsilon(1e-9));
    auto cum = metrics.cumulative_regret();
    CHECK(cum.back() == doctest::Approx(metrics.total_regret()).epsilon(1e-9));
    for (std::size_t t = 1; t < cum.size(); ++t) CHECK(cum[t] >= cum[t - 1]);
}

TEST_CASE("play counts add up to the horizon") {
    BanditInstance instance({0.1, 0.5, 0.9, 0.2}, 0.04, RewardFamily::Uniform);
    Policy policy(EpsilonGreedy{0.2}, 4);
    Rng rng(9);
    RunMetrics metrics = run_single(instance, policy, 777, rng);
    CHECK(std::accumulate(metrics.play_counts.begin(), metrics.play_counts.end(),
                          std::uint64_t{0}) == 777);
}

TEST_CASE("run_experiment is deterministic across thread counts") {
    ExperimentConfig config;
    config.arm_count = 5;
    config.variance = 0.01;
    config.horizon = 200;
    config.repetitions = 40;
    config.policy = EpsilonGreedy{0.1};
    config.master_seed = 42;

    config.threads = 1;
    AggregateMetrics one = run_experiment(config);
    config.threads = 3;
    AggregateMetrics three = run_experiment(config);
    config.threads = 7;
    AggregateMetrics seven = run_experiment(config);

    CHECK(one.mean_total_regret == three.mean_total_regret);
    CHECK(one.std_error_total_regret == three.std_error_total_regret);
    CHECK(one.regret_curve == three.regret_curve);
    CHECK(one.optimal_fraction_curve == seven.optimal_fraction_curve);
    CHECK(one.mean_total_regret == seven.mean_total_regret);
}

TEST_CASE("different master seeds give different results") {
    ExperimentConfig config;
    config.arm_count = 5;
    config.horizon = 100;
    config.repetitions = 10;
    config.policy = Softmax{0.1};
    config.master_seed = 1;
    AggregateMetrics a = run_experiment(config);
    config.master_seed = 2;
    AggregateMetrics b = run_experiment(config);
    CHECK(a.mean_total_regret != b.mean_total_regret);
}

TEST_CASE("standard error shrinks roughly like 1/sqrt(repetitions)") {
    ExperimentConfig config;
    config.arm_count = 10;
    config.variance = 0.01;
    config.horizon = 200;
    config.policy = EpsilonGreedy{0.1};
    config.master_seed = 11;
    config.repetitions = 100;
    double se_small = run_experiment(config).std_error_total_regret;
    config.repetitions = 400;
    double se_large = run_experiment(config).std_error_total_regret;
    double ratio = se_small / se_large;  // ideal: 2
    CHECK(ratio > 2.0 / 1.5);
    CHECK(ratio < 2.0 * 1.5);
}

TEST_CASE("mean per-turn regret flattens out for a learning policy") {
    ExperimentConfig config;
    config.arm_count = 10;
    config.variance = 0.01;
    config.horizon = 1000;
    config.repetitions = 200;
    config.policy = EpsilonGreedy{0.05};
    config.master_seed = 13;
    AggregateMetrics agg = run_experiment(config);
    double early = std::accumulate(agg.regret_curve.begin(),
                                   agg.regret_curve.begin() + 50, 0.0) / 50.0;
    double late = std::accumulate(agg.regret_curve.end() - 50,
                                  agg.regret_curve.end(), 0.0) / 50.0;
    CHECK(late < 0.5 * early);
    double last_optimal = std::accumulate(agg.optimal_fraction_curve.end() - 50,
                                          agg.optimal_fraction_curve.end(), 0.0) / 50.0;
    CHECK(last_optimal > 0.6);
}

TEST_CASE("tune picks the grid minimum and reports the full table") {
    ExperimentConfig config;
    config.arm_count = 10;
    config.variance = 0.01;
    config.horizon = 300;
    config.repetitions = 60;
    config.policy = EpsilonGreedy{0.1};
    config.master_seed = 17;
    std::vector<double> grid = {0.01, 0.5, 0.9};
    auto apply = [](const PolicyConfig&, double value) -> PolicyConfig {
        return EpsilonGreedy{value};
    };
    TuneResult result = tune(config, grid, +apply);
    REQUIRE(result.table.size() == grid.size());
    double best_regret = result.table[0].second;
    for (const auto& [value, regret] : result.table)
        if (regret < best_regret) best_regret = regret;
    for (const auto& [value, regret] : result.table)
        if (value == result.best_value)
            CHECK(regret == doctest::Approx(best_regret));
    // near-random exploration rates should do worse than a small epsilon
    CHECK(result.best_value == doctest::Approx(0.01));
}

TEST_CASE("lai-robbins reference curve: frozen normal-family value") {
    BanditInstance instance({1.0, 0.5}, 1.0, RewardFamily::Normal);
    // gap 0.5, KL = gap^2 / (2 sigma^2) = 0.125; bound = 0.5 ln(t) / 0.125
    CHECK(lai_robbins_bound(instance, 100) ==
          doctest::Approx(18.420680743952367).epsilon(1e-12));
    CHECK_THROWS_AS(lai_robbins_bound(instance, 0), UndefinedBound);
}

TEST_CASE("lai-robbins bernoulli branch and degenerate cases") {
    BanditInstance bern({0.8, 0.6}, 0.01, RewardFamily::Bernoulli);
    double kl = 0.6 * std::log(0.6 / 0.8) + 0.4 * std::log(0.4 / 0.2);
    CHECK(lai_robbins_bound(bern, 50) ==
          doctest::Approx(0.2 * std::log(50.0) / kl).epsilon(1e-12));
    BanditInstance degenerate({1.0, 0.5}, 0.01, RewardFamily::Bernoulli);
    CHECK_THROWS_AS(lai_robbins_bound(degenerate, 50), UndefinedBound);
    BanditInstance flat({0.5, 0.5}, 1.0, RewardFamily::Normal);
    CHECK(lai_robbins_bound(flat, 50) == 0.0);
}

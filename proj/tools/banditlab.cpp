#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "banditlab/config.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/io.hpp"
#include "banditlab/stats.hpp"
#include "banditlab/trial.hpp"

namespace fs = std::filesystem;
using namespace banditlab;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitIntegrity = 4;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::optional<std::size_t> reps;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("BANDITLAB_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("BANDITLAB_SEED: not an unsigned integer");
        }
    }
    return 0;
}

AppConfig load_config(const GlobalOptions& options) {
    if (options.config_path.empty()) return AppConfig{};
    return parse_config_file(options.config_path);
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);
    // Probe writability up front.
    fs::path probe = fs::path(dir) / ".banditlab_probe";
    try {
        write_text_file(probe.string(), "");
    } catch (const IoError&) {
        throw IoError("output directory is not writable: " + dir);
    }
    fs::remove(probe, ec);
}

std::string sigma_label(double sigma) {
    std::string s = format_double(sigma);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

std::string policy_params_label(const PolicyConfig& policy) {
    struct Visitor {
        std::string operator()(const EpsilonGreedy& p) const {
            return "epsilon=" + format_double(p.epsilon);
        }
        std::string operator()(const Softmax& p) const {
            return "tau=" + format_double(p.tau);
        }
        std::string operator()(const Pursuit& p) const {
            return "beta=" + format_double(p.beta);
        }
        std::string operator()(const ReinforcementComparison& p) const {
            return "alpha=" + format_double(p.alpha) + ";beta=" + format_double(p.beta);
        }
        std::string operator()(const Ucb1&) const { return "-"; }
        std::string operator()(const Ucb1Tuned&) const { return "-"; }
    };
    return std::visit(Visitor{}, policy);
}

void write_manifest(RunManifest& manifest, const std::string& dir,
                    std::chrono::steady_clock::time_point start) {
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text_file((fs::path(dir) / "run_manifest.json").string(),
                    manifest_to_json(manifest));
}

int cmd_bench(const GlobalOptions& options) {
    auto start = std::chrono::steady_clock::now();
    AppConfig app = load_config(options);
    BenchConfig& bench = app.bench;
    if (options.reps) bench.repetitions = *options.reps;
    ensure_out_dir(options.out_dir);

    RunManifest manifest;
    manifest.command = "bench";
    manifest.tool_version = kToolVersion;
    manifest.master_seed = options.seed;
    manifest.config = {
        {"horizon", std::to_string(bench.horizon)},
        {"repetitions", std::to_string(bench.repetitions)},
        {"family", reward_family_name(bench.family)},
        {"mean_mode",
         bench.mean_mode == MeanSamplingMode::UniformOn01 ? "uniform" : "normal"},
    };

    std::ostringstream summary;
    summary << "algorithm,params,arm_count,sigma,mean_total_regret,std_error\n";

    std::uint64_t cell_index = 0;
    for (std::size_t arm_count : bench.arm_counts) {
        for (double sigma : bench.sigmas) {
            TunedParams params = bench.resolve_params(arm_count, sigma);
            for (const std::string& algorithm : bench.algorithms) {
                ExperimentConfig config;
                config.arm_count = arm_count;
                config.variance = sigma * sigma;
                config.family = bench.family;
                config.mean_mode = bench.mean_mode;
                config.horizon = bench.horizon;
                config.repetitions = bench.repetitions;
                config.policy = make_policy_config(algorithm, params);
                config.master_seed = derive_seed(options.seed, {kBenchStream, cell_index});
                config.threads = options.threads;
                AggregateMetrics agg = run_experiment(config);

                std::ostringstream curve;
                curve << "turn,mean_regret,cum_regret,optimal_fraction\n";
                double cum = 0.0;
                for (std::size_t t = 0; t < config.horizon; ++t) {
                    cum += agg.regret_curve[t];
                    curve << t + 1 << ',' << format_double(agg.regret_curve[t]) << ','
                          << format_double(cum) << ','
                          << format_double(agg.optimal_fraction_curve[t]) << '\n';
                }
                std::string cell_name = "K" + std::to_string(arm_count) + "_sigma" +
                                        sigma_label(sigma) + "_" + algorithm;
                emit_output(manifest, options.out_dir, cell_name + "/regret_curve.csv",
                            curve.str());

                summary << algorithm << ',' << policy_params_label(config.policy) << ','
                        << arm_count << ',' << format_double(sigma) << ','
                        << format_double(agg.mean_total_regret) << ','
                        << format_double(agg.std_error_total_regret) << '\n';
                ++cell_index;
            }
        }
    }
    emit_output(manifest, options.out_dir, "summary.csv", summary.str());
    write_manifest(manifest, options.out_dir, start);
    return kExitOk;
}

PolicyConfig apply_grid_value(const PolicyConfig& policy, double value) {
    struct Visitor {
        double value;
        PolicyConfig operator()(const EpsilonGreedy&) const { return EpsilonGreedy{value}; }
        PolicyConfig operator()(const Softmax&) const { return Softmax{value}; }
        PolicyConfig operator()(const Pursuit&) const { return Pursuit{value}; }
        PolicyConfig operator()(const ReinforcementComparison& rc) const {
            return ReinforcementComparison{rc.alpha, value};
        }
        PolicyConfig operator()(const Ucb1&) const {
            throw ConfigError("tune.algorithm: ucb1 has no tunable parameter");
        }
        PolicyConfig operator()(const Ucb1Tuned&) const {
            throw ConfigError("tune.algorithm: ucb1_tuned has no tunable parameter");
        }
    };
    return std::visit(Visitor{value}, policy);
}

int cmd_tune(const GlobalOptions& options) {
    auto start = std::chrono::steady_clock::now();
    AppConfig app = load_config(options);
    TuneConfig& tune_config = app.tune;
    if (options.reps) tune_config.repetitions = *options.reps;
    ensure_out_dir(options.out_dir);

    ExperimentConfig config;
    config.arm_count = tune_config.arm_count;
    config.variance = tune_config.sigma * tune_config.sigma;
    config.family = tune_config.family;
    config.mean_mode = tune_config.mean_mode;
    config.horizon = tune_config.horizon;
    config.repetitions = tune_config.repetitions;
    config.policy =
        make_policy_config(tune_config.algorithm,
                           tuned_params(tune_config.arm_count, tune_config.sigma));
    config.master_seed = options.seed;
    config.threads = options.threads;
    // Probe the parameter applicability before running the grid.
    apply_grid_value(config.policy, tune_config.grid.front());

    TuneResult result = tune(config, tune_config.grid, &apply_grid_value);

    RunManifest manifest;
    manifest.command = "tune";
    manifest.tool_version = kToolVersion;
    manifest.master_seed = options.seed;
    manifest.config = {
        {"algorithm", tune_config.algorithm},
        {"arm_count", std::to_string(tune_config.arm_count)},
        {"sigma", format_double(tune_config.sigma)},
        {"repetitions", std::to_string(tune_config.repetitions)},
    };

    std::ostringstream table;
    table << "value,mean_total_regret\n";
    for (const auto& [value, regret] : result.table)
        table << format_double(value) << ',' << format_double(regret) << '\n';
    emit_output(manifest, options.out_dir,
                "tune_" + tune_config.algorithm + ".csv", table.str());

    std::ostringstream best;
    best << "algorithm,best_value\n"
         << tune_config.algorithm << ',' << format_double(result.best_value) << '\n';
    emit_output(manifest, options.out_dir, "best.csv", best.str());
    write_manifest(manifest, options.out_dir, start);
    return kExitOk;
}

int cmd_trial(const GlobalOptions& options, const std::string& population_path,
              const std::string& synthetic, const std::string& strategy_filter) {
    auto start = std::chrono::steady_clock::now();
    AppConfig app = load_config(options);
    TrialRunConfig& trial = app.trial;
    if (options.reps) trial.repetitions = *options.reps;
    if (!strategy_filter.empty()) {
        trial.strategies.clear();
        std::stringstream ss(strategy_filter);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) trial.strategies.push_back(item);
        if (trial.strategies.empty())
            throw ConfigError("--strategy: empty strategy list");
        for (const std::string& name : trial.strategies)
            if (name != "randomization") trial.make_strategy(name);
    }
    if (population_path.empty() && synthetic.empty())
        throw ConfigError("trial requires --population <csv> or --synthetic in|out");
    if (!population_path.empty() && !synthetic.empty())
        throw ConfigError("--population and --synthetic are mutually exclusive");

    TreatmentPopulation population;
    if (!population_path.empty()) {
        if (!fs::exists(population_path))
            throw IoError("population file not found: " + population_path);
        population = load_population(population_path);
    } else {
        if (synthetic != "in" && synthetic != "out")
            throw ConfigError("--synthetic: expected 'in' or 'out'");
        Rng rng(derive_seed(options.seed, {kTrialStream, 0xF00D}));
        population = generate_synthetic_population(
            synthetic == "in" ? in_patient_profile() : out_patient_profile(),
            trial.synthetic_size_per_arm, rng);
    }
    ensure_out_dir(options.out_dir);

    RunManifest manifest;
    manifest.command = "trial";
    manifest.tool_version = kToolVersion;
    manifest.master_seed = options.seed;
    manifest.config = {
        {"patient_count", std::to_string(trial.patient_count)},
        {"accrual_weeks", std::to_string(trial.accrual_weeks)},
        {"feedback_delay_days", std::to_string(trial.feedback_delay_days)},
        {"repetitions", std::to_string(trial.repetitions)},
        {"population", population_path.empty() ? "synthetic:" + synthetic
                                               : population_path},
    };

    for (std::size_t s = 0; s < trial.strategies.size(); ++s) {
        const std::string& name = trial.strategies[s];
        TrialConfig config;
        config.patient_count = trial.patient_count;
        config.accrual_weeks = trial.accrual_weeks;
        config.feedback_delay_days = trial.feedback_delay_days;
        config.strategy = trial.make_strategy(name);
        config.seed = derive_seed(options.seed, {kTrialStream, s});
        TrialResult result =
            repeat_trials(config, population, trial.repetitions, options.threads);

        std::ostringstream treated;
        treated << "day,treated\n";
        for (std::size_t d = 0; d < result.treated_per_day.size(); ++d)
            treated << d << ',' << format_double(result.treated_per_day[d]) << '\n';
        emit_output(manifest, options.out_dir, name + "/treated_per_day.csv",
                    treated.str());

        std::ostringstream contingency;
        contingency << "arm,success,failure,total\n";
        contingency << "bupnal," << format_double(result.contingency.cells[0][0]) << ','
                    << format_double(result.contingency.cells[0][1]) << ','
                    << format_double(result.contingency.row_total(0)) << '\n';
        contingency << "clon," << format_double(result.contingency.cells[1][0]) << ','
                    << format_double(result.contingency.cells[1][1]) << ','
                    << format_double(result.contingency.row_total(1)) << '\n';
        contingency << "p_value," << format_double(result.p_value) << ",corrected,"
                    << (result.p_corrected ? 1 : 0) << '\n';
        contingency << "uncorrected_p_value,"
                    << format_double(result.uncorrected_p_value) << ",,\n";
        emit_output(manifest, options.out_dir, name + "/contingency.csv",
                    contingency.str());

        std::ostringstream km;
        km << "day,fraction_remaining\n";
        for (std::size_t d = 0; d < result.km_curve.size(); ++d)
            km << d + 1 << ',' << format_double(result.km_curve[d]) << '\n';
        emit_output(manifest, options.out_dir, name + "/km.csv", km.str());

        std::ostringstream adverse;
        adverse << "day,adverse_per_patient\n";
        for (std::size_t d = 0; d < result.adverse_curve.size(); ++d)
            adverse << d + 1 << ',' << format_double(result.adverse_curve[d]) << '\n';
        emit_output(manifest, options.out_dir, name + "/adverse.csv", adverse.str());

        std::ostringstream cravings;
        cravings << "mean_arsw,mean_vas\n"
                 << format_double(result.mean_arsw) << ','
                 << format_double(result.mean_vas) << '\n';
        emit_output(manifest, options.out_dir, name + "/cravings.csv", cravings.str());
    }
    write_manifest(manifest, options.out_dir, start);
    return kExitOk;
}

int cmd_report(const std::string& dir) {
    fs::path manifest_path = fs::path(dir) / "run_manifest.json";
    if (!fs::exists(manifest_path))
        throw IoError("no run_manifest.json in: " + dir);
    RunManifest manifest = manifest_from_json(read_text_file(manifest_path.string()));

    bool tampered = false;
    for (const RunManifest::Output& output : manifest.outputs) {
        fs::path path = fs::path(dir) / output.name;
        if (!fs::exists(path)) {
            std::cerr << "warning: missing output file: " << output.name << '\n';
            tampered = true;
            continue;
        }
        std::string checksum = to_hex(fnv1a64_file(path.string()));
        if (checksum != output.checksum) {
            std::cerr << "warning: checksum mismatch for " << output.name
                      << " (manifest " << output.checksum << ", file " << checksum
                      << ")\n";
            tampered = true;
        }
    }

    std::cout << "command: " << manifest.command
              << "  seed: " << manifest.master_seed
              << "  outputs: " << manifest.outputs.size()
              << "  duration: " << manifest.duration_seconds << "s\n";

    fs::path summary = fs::path(dir) / "summary.csv";
    if (fs::exists(summary)) {
        std::ifstream in(summary);
        std::string header;
        std::getline(in, header);
        struct Row {
            double regret;
            std::string text;
        };
        std::vector<Row> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            // mean_total_regret is the fifth field
            std::stringstream ss(line);
            std::string field;
            double regret = 0.0;
            for (int i = 0; i < 5 && std::getline(ss, field, ','); ++i)
                if (i == 4) regret = std::strtod(field.c_str(), nullptr);
            rows.push_back({regret, line});
        }
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.regret < b.regret; });
        std::cout << header << '\n';
        for (const Row& row : rows) std::cout << row.text << '\n';
    }

    for (const RunManifest::Output& output : manifest.outputs) {
        if (output.name.size() > 16 &&
            output.name.substr(output.name.size() - 16) == "/contingency.csv") {
            fs::path path = fs::path(dir) / output.name;
            if (!fs::exists(path)) continue;
            std::cout << "\n" << output.name << ":\n" << read_text_file(path.string());
        }
    }
    return tampered ? kExitIntegrity : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"banditlab: bandit benchmark harness and adaptive-trial simulator"};
    app.require_subcommand(1);

    GlobalOptions options;
    options.threads = std::max(1u, std::thread::hardware_concurrency());

    std::string population_path, synthetic, strategy_filter, report_dir;
    bool seed_given = false;
    std::size_t reps_value = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", options.config_path, "configuration file");
        sub->add_option("--out", options.out_dir, "output directory")->required();
        sub->add_option("--seed", options.seed, "master seed")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--threads", options.threads, "worker thread count");
        sub->add_option("--reps", reps_value, "override repetition count")
            ->each([&](const std::string& v) {
                options.reps = static_cast<std::size_t>(std::stoull(v));
            });
    };

    CLI::App* bench = app.add_subcommand("bench", "run the regret benchmark grid");
    add_common(bench);
    CLI::App* tune_cmd = app.add_subcommand("tune", "grid-search one algorithm parameter");
    add_common(tune_cmd);
    CLI::App* trial = app.add_subcommand("trial", "simulate the adaptive clinical trial");
    add_common(trial);
    trial->add_option("--population", population_path, "patient CSV file");
    trial->add_option("--synthetic", synthetic, "synthetic population: in|out");
    trial->add_option("--strategy", strategy_filter, "comma-separated strategy list");
    CLI::App* report = app.add_subcommand("report", "summarize an output directory");
    report->add_option("dir", report_dir, "output directory to summarize")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (!seed_given) options.seed = default_seed();
        if (bench->parsed()) return cmd_bench(options);
        if (tune_cmd->parsed()) return cmd_tune(options);
        if (trial->parsed())
            return cmd_trial(options, population_path, synthetic, strategy_filter);
        if (report->parsed()) return cmd_report(report_dir);
    } catch (const PopulationParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidConfiguration& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UnsupportedConfiguration& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PopulationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitConfig;
}

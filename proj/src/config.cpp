#include "banditlab/config.hpp"

#include "banditlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace banditlab {

namespace {

// Pre-tuned parameters per canonical cell, taken from per-cell grid search
// (minimum mean total regret over 1000 repetitions at horizon 1000).
struct TunedCell {
    std::size_t arm_count;
    double sigma;
    TunedParams params;
};

const TunedCell kTunedTable[] = {
    {2, 0.01, {0.005, 0.001, 0.1, 0.4, 0.98}},
    {2, 0.1, {0.001, 0.01, 0.1, 0.4, 0.98}},
    {2, 1.0, {0.05, 0.1, 0.05, 0.4, 0.98}},
    {5, 0.01, {0.005, 0.001, 0.4, 0.1, 0.95}},
    {5, 0.1, {0.001, 0.01, 0.25, 0.1, 0.95}},
    {5, 1.0, {0.05, 0.1, 0.05, 0.01, 0.9}},
    {10, 0.01, {0.001, 0.001, 0.5, 0.01, 0.98}},
    {10, 0.1, {0.005, 0.01, 0.5, 0.1, 0.95}},
    {10, 1.0, {0.1, 0.05, 0.05, 0.1, 0.98}},
    {50, 0.01, {0.005, 0.001, 0.5, 0.01, 0.98}},
    {50, 0.1, {0.005, 0.01, 0.5, 0.1, 0.98}},
    {50, 1.0, {0.01, 0.007, 0.5, 0.01, 0.98}},
};

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

double parse_number(const std::string& path, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(path + ": not a number: '" + value + "'");
    }
}

std::size_t parse_count(const std::string& path, const std::string& value) {
    double v = parse_number(path, value);
    if (v < 1.0 || v != std::floor(v))
        throw ConfigError(path + ": expected a positive integer, got '" + value + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

TunedParams tuned_params(std::size_t arm_count, double sigma) {
    const TunedCell* best = nullptr;
    double best_distance = 0.0;
    for (const TunedCell& cell : kTunedTable) {
        double dk = std::log(static_cast<double>(cell.arm_count)) -
                    std::log(static_cast<double>(arm_count));
        double ds = std::log(cell.sigma) - std::log(std::max(sigma, 1e-12));
        double distance = dk * dk + ds * ds;
        if (!best || distance < best_distance) {
            best = &cell;
            best_distance = distance;
        }
    }
    return best->params;
}

PolicyConfig make_policy_config(const std::string& algorithm, const TunedParams& params) {
    if (algorithm == "epsilon_greedy") return EpsilonGreedy{params.epsilon};
    if (algorithm == "softmax") return Softmax{params.tau};
    if (algorithm == "pursuit") return Pursuit{params.pursuit_beta};
    if (algorithm == "reinforcement_comparison")
        return ReinforcementComparison{params.rc_alpha, params.rc_beta};
    if (algorithm == "ucb1") return Ucb1{};
    if (algorithm == "ucb1_tuned") return Ucb1Tuned{};
    throw ConfigError("unknown algorithm: '" + algorithm + "'");
}

const std::vector<std::string>& all_algorithm_names() {
    static const std::vector<std::string> names = {
        "epsilon_greedy", "softmax",    "pursuit",
        "reinforcement_comparison", "ucb1", "ucb1_tuned"};
    return names;
}

TunedParams BenchConfig::resolve_params(std::size_t arm_count, double sigma) const {
    TunedParams params = tuned_params(arm_count, sigma);
    if (!std::isnan(epsilon)) params.epsilon = epsilon;
    if (!std::isnan(tau)) params.tau = tau;
    if (!std::isnan(pursuit_beta)) params.pursuit_beta = pursuit_beta;
    if (!std::isnan(rc_alpha)) params.rc_alpha = rc_alpha;
    if (!std::isnan(rc_beta)) params.rc_beta = rc_beta;
    return params;
}

AllocationStrategy TrialRunConfig::make_strategy(const std::string& name) const {
    if (name == "randomization")
        return FixedRandomization{randomization_bupnal, randomization_clon};
    TunedParams params{epsilon, tau, pursuit_beta, rc_alpha, rc_beta};
    return BanditStrategy{make_policy_config(name, params)};
}

AppConfig parse_config(std::istream& in) {
    AppConfig config;
    std::string line;
    std::string section;
    std::size_t line_number = 0;

    std::map<std::string, std::map<std::string, std::string>> raw;
    while (std::getline(in, line)) {
        ++line_number;
        std::string text = trim(line);
        if (std::size_t hash = text.find('#'); hash != std::string::npos)
            text = trim(text.substr(0, hash));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError("line " + std::to_string(line_number) +
                                  ": malformed section header");
            section = trim(text.substr(1, text.size() - 2));
            if (section != "bench" && section != "tune" && section != "trial")
                throw ConfigError("unknown section: [" + section + "]");
            raw[section];
            continue;
        }
        std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_number) +
                              ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_number) +
                              ": key outside of a section");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (raw[section].count(key))
            throw ConfigError(section + "." + key + ": duplicate key");
        raw[section][key] = value;
    }

    for (const auto& [sec, entries] : raw) {
        for (const auto& [key, value] : entries) {
            const std::string path = sec + "." + key;
            if (sec == "bench") {
                BenchConfig& b = config.bench;
                if (key == "horizon") b.horizon = parse_count(path, value);
                else if (key == "repetitions") b.repetitions = parse_count(path, value);
                else if (key == "family") b.family = reward_family_from_name(value);
                else if (key == "mean_mode") {
                    if (value == "uniform") b.mean_mode = MeanSamplingMode::UniformOn01;
                    else if (value == "normal") b.mean_mode = MeanSamplingMode::NormalAround05;
                    else throw ConfigError(path + ": expected 'uniform' or 'normal'");
                } else if (key == "arm_counts") {
                    b.arm_counts.clear();
                    for (const std::string& item : split_list(value))
                        b.arm_counts.push_back(parse_count(path, item));
                } else if (key == "sigmas") {
                    b.sigmas.clear();
                    for (const std::string& item : split_list(value))
                        b.sigmas.push_back(parse_number(path, item));
                } else if (key == "algorithms") {
                    b.algorithms = split_list(value);
                } else if (key == "epsilon") b.epsilon = parse_number(path, value);
                else if (key == "tau") b.tau = parse_number(path, value);
                else if (key == "pursuit_beta") b.pursuit_beta = parse_number(path, value);
                else if (key == "rc_alpha") b.rc_alpha = parse_number(path, value);
                else if (key == "rc_beta") b.rc_beta = parse_number(path, value);
                else throw ConfigError(path + ": unknown key");
            } else if (sec == "tune") {
                TuneConfig& t = config.tune;
                if (key == "algorithm") t.algorithm = value;
                else if (key == "arm_count") t.arm_count = parse_count(path, value);
                else if (key == "sigma") t.sigma = parse_number(path, value);
                else if (key == "grid") {
                    t.grid.clear();
                    for (const std::string& item : split_list(value))
                        t.grid.push_back(parse_number(path, item));
                } else if (key == "horizon") t.horizon = parse_count(path, value);
                else if (key == "repetitions") t.repetitions = parse_count(path, value);
                else if (key == "family") t.family = reward_family_from_name(value);
                else if (key == "mean_mode") {
                    if (value == "uniform") t.mean_mode = MeanSamplingMode::UniformOn01;
                    else if (value == "normal") t.mean_mode = MeanSamplingMode::NormalAround05;
                    else throw ConfigError(path + ": expected 'uniform' or 'normal'");
                } else throw ConfigError(path + ": unknown key");
            } else {  // trial
                TrialRunConfig& t = config.trial;
                if (key == "patient_count") t.patient_count = parse_count(path, value);
                else if (key == "accrual_weeks") t.accrual_weeks = parse_count(path, value);
                else if (key == "feedback_delay_days") {
                    double v = parse_number(path, value);
                    if (v < 0.0 || v != std::floor(v))
                        throw ConfigError(path + ": expected a nonnegative integer");
                    t.feedback_delay_days = static_cast<int>(v);
                } else if (key == "repetitions") t.repetitions = parse_count(path, value);
                else if (key == "strategies") t.strategies = split_list(value);
                else if (key == "epsilon") t.epsilon = parse_number(path, value);
                else if (key == "tau") t.tau = parse_number(path, value);
                else if (key == "pursuit_beta") t.pursuit_beta = parse_number(path, value);
                else if (key == "rc_alpha") t.rc_alpha = parse_number(path, value);
                else if (key == "rc_beta") t.rc_beta = parse_number(path, value);
                else if (key == "randomization_ratio") {
                    std::size_t colon = value.find(':');
                    if (colon == std::string::npos)
                        throw ConfigError(path + ": expected 'a:b'");
                    t.randomization_bupnal = parse_number(path, trim(value.substr(0, colon)));
                    t.randomization_clon = parse_number(path, trim(value.substr(colon + 1)));
                } else if (key == "synthetic_size_per_arm") {
                    t.synthetic_size_per_arm = parse_count(path, value);
                } else throw ConfigError(path + ": unknown key");
            }
        }
    }

    if (config.bench.algorithms.empty())
        throw ConfigError("bench.algorithms: must not be empty");
    for (const std::string& name : config.bench.algorithms)
        make_policy_config(name, tuned_params(10, 0.1));  // name check
    if (config.tune.grid.empty())
        throw ConfigError("tune.grid: must not be empty");
    if (config.trial.strategies.empty())
        throw ConfigError("trial.strategies: must not be empty");
    for (const std::string& name : config.trial.strategies)
        if (name != "randomization") make_policy_config(name, tuned_params(2, 1.0));
    return config;
}

AppConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_config(in);
}

}  // namespace banditlab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "banditlab/io.hpp"

namespace fs = std::filesystem;
using banditlab::read_text_file;
using banditlab::write_text_file;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(BANDITLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "banditlab_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("bench is byte-identical for a fixed seed, any thread count") {
    fs::path base = fresh_dir("bench_repro");
    fs::path config = base / "bench.ini";
    write_text_file(config.string(),
                    "[bench]\n"
                    "horizon = 60\n"
                    "repetitions = 8\n"
                    "arm_counts = 3\n"
                    "sigmas = 0.1\n"
                    "algorithms = epsilon_greedy, ucb1\n");
    fs::path out_a = base / "a", out_b = base / "b", out_c = base / "c";
    CHECK(run("bench --config " + config.string() + " --out " + out_a.string() +
              " --seed 7 --threads 1") == 0);
    CHECK(run("bench --config " + config.string() + " --out " + out_b.string() +
              " --seed 7 --threads 3") == 0);
    CHECK(run("bench --config " + config.string() + " --out " + out_c.string() +
              " --seed 8 --threads 1") == 0);

    for (const char* name :
         {"summary.csv", "K3_sigma0p1_epsilon_greedy/regret_curve.csv",
          "K3_sigma0p1_ucb1/regret_curve.csv"}) {
        std::string a = read_text_file((out_a / name).string());
        std::string b = read_text_file((out_b / name).string());
        CHECK(a == b);
        CHECK(a != read_text_file((out_c / name).string()));
    }
    // the manifests differ only in their timing field
    CHECK(run("report " + out_a.string()) == 0);
}

TEST_CASE("tune writes the parameter table") {
    fs::path base = fresh_dir("tune");
    fs::path config = base / "tune.ini";
    write_text_file(config.string(),
                    "[tune]\n"
                    "algorithm = softmax\n"
                    "arm_count = 3\n"
                    "sigma = 0.1\n"
                    "grid = 0.01, 0.1\n"
                    "horizon = 60\n"
                    "repetitions = 8\n");
    fs::path out = base / "out";
    CHECK(run("tune --config " + config.string() + " --out " + out.string() +
              " --seed 5") == 0);
    std::string table = read_text_file((out / "tune_softmax.csv").string());
    CHECK(table.find("value,mean_total_regret") == 0);
    CHECK(fs::exists(out / "best.csv"));
    CHECK(fs::exists(out / "run_manifest.json"));

    // parameter-free algorithms cannot be tuned
    write_text_file(config.string(), "[tune]\nalgorithm = ucb1\n");
    CHECK(run("tune --config " + config.string() + " --out " +
              (base / "out2").string()) == 2);
}

TEST_CASE("trial runs on a synthetic population and is reproducible") {
    fs::path base = fresh_dir("trial");
    fs::path out_a = base / "a", out_b = base / "b";
    std::string common = "trial --synthetic in --strategy randomization,ucb1 "
                         "--reps 5 --seed 11 --out ";
    CHECK(run(common + out_a.string()) == 0);
    CHECK(run(common + out_b.string()) == 0);
    for (const char* name :
         {"randomization/treated_per_day.csv", "randomization/contingency.csv",
          "randomization/km.csv", "randomization/adverse.csv",
          "randomization/cravings.csv", "ucb1/contingency.csv"}) {
        CHECK(read_text_file((out_a / name).string()) ==
              read_text_file((out_b / name).string()));
    }
    CHECK(run("report " + out_a.string()) == 0);
}

TEST_CASE("configuration problems exit with code 2") {
    fs::path base = fresh_dir("errors");
    fs::path out = base / "out";
    CHECK(run("bench --out " + out.string() + " --bogus-flag") == 2);
    CHECK(run("trial --out " + out.string()) == 2);  // no population source
    CHECK(run("trial --out " + out.string() + " --synthetic sideways") == 2);
    fs::path config = base / "bad.ini";
    write_text_file(config.string(), "[bench]\nunknown_key = 1\n");
    CHECK(run("bench --config " + config.string() + " --out " + out.string()) == 2);

    // malformed population rows exit 2 as well
    fs::path pop = base / "pop.csv";
    write_text_file(pop.string(),
                    "treatment,success,participation_days,ae_d1,ae_d2,ae_d3,ae_d4,"
                    "ae_d5,ae_d6,ae_d7,ae_d8,ae_d9,ae_d10,ae_d11,ae_d12,ae_d13,"
                    "ae_d14,arsw,vas\n"
                    "bupnal,1,3,0,0,0,0,0,0,0,0,0,0,0,0,0,0,20,30\n");
    CHECK(run("trial --population " + pop.string() + " --out " + out.string()) == 2);
}

TEST_CASE("i/o problems exit with code 3") {
    fs::path base = fresh_dir("io_errors");
    CHECK(run("bench --config /nonexistent.ini --out " + (base / "x").string()) == 3);
    CHECK(run("trial --population /nonexistent.csv --out " +
              (base / "y").string()) == 3);
    CHECK(run("report " + (base).string()) == 3);  // no manifest here
}

TEST_CASE("report detects tampered outputs and exits 4") {
    fs::path base = fresh_dir("integrity");
    fs::path config = base / "bench.ini";
    write_text_file(config.string(),
                    "[bench]\nhorizon = 30\nrepetitions = 4\narm_counts = 2\n"
                    "sigmas = 1\nalgorithms = softmax\n");
    fs::path out = base / "out";
    REQUIRE(run("bench --config " + config.string() + " --out " + out.string()) == 0);
    REQUIRE(run("report " + out.string()) == 0);
    fs::path victim = out / "summary.csv";
    write_text_file(victim.string(),
                    read_text_file(victim.string()) + "tampered\n");
    CHECK(run("report " + out.string()) == 4);
    fs::remove(victim);
    CHECK(run("report " + out.string()) == 4);
}

TEST_CASE("BANDITLAB_SEED provides the default seed") {
    fs::path base = fresh_dir("env_seed");
    fs::path config = base / "bench.ini";
    write_text_file(config.string(),
                    "[bench]\nhorizon = 30\nrepetitions = 4\narm_counts = 2\n"
                    "sigmas = 0.1\nalgorithms = ucb1\n");
    auto run_env = [&](const std::string& env, const fs::path& out) {
        std::string cmd = env + " " + BANDITLAB_CLI_PATH + " bench --config " +
                          config.string() + " --out " + out.string() +
                          " >/dev/null 2>&1";
        int status = std::system(cmd.c_str());
        REQUIRE(status != -1);
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    CHECK(run_env("BANDITLAB_SEED=99", base / "env") == 0);
    CHECK(run("bench --config " + config.string() + " --out " +
              (base / "flag").string() + " --seed 99") == 0);
    CHECK(read_text_file((base / "env" / "summary.csv").string()) ==
          read_text_file((base / "flag" / "summary.csv").string()));
    CHECK(run_env("BANDITLAB_SEED=nope", base / "bad") == 2);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "banditlab/stats.hpp"
#include "banditlab/trial.hpp"

using namespace banditlab;

namespace {

ContingencyTable2x2 table_of(double a, double b, double c, double d) {
    ContingencyTable2x2 t;
    t.cells = {{{a, b}, {c, d}}};
    return t;
}

// Independent oracle for the df=1 chi-squared survival function:
// numerically integrates the density x^{-1/2} e^{-x/2} / sqrt(2 pi) on
// [0, stat] with Simpson's rule over a substituted variable to handle the
// singularity at zero (x = u^2 => integrand 2 e^{-u^2/2} / sqrt(2 pi)).
double chi2_df1_pvalue_oracle(double stat) {
    if (stat <= 0.0) return 1.0;
    double upper = std::sqrt(stat);
    const int n = 20000;  // even
    double h = upper / n;
    auto f = [](double u) {
        return 2.0 * std::exp(-u * u / 2.0) / std::sqrt(2.0 * 3.14159265358979323846);
    };
    double sum = f(0.0) + f(upper);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
    double cdf = sum * h / 3.0;
    return 1.0 - cdf;
}

}  // namespace

TEST_CASE("balanced table: zero statistic, p = 1") {
    ChiSquaredResult r = chi_squared_test(table_of(10, 10, 10, 10));
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
    CHECK_FALSE(r.corrected);
}

TEST_CASE("p-value agrees with a numerically integrated chi-squared tail") {
    // classic critical value: chi2(1) = 3.84146 <-> p = 0.05
    ChiSquaredResult r = chi_squared_test(table_of(30, 70, 45, 55));
    CHECK(r.p_value == doctest::Approx(chi2_df1_pvalue_oracle(r.statistic)).epsilon(1e-6));
    for (double stat : {0.5, 1.0, 2.0, 3.841458820694124, 6.634896601021215, 10.0}) {
        double via_erfc = std::erfc(std::sqrt(stat / 2.0));
        CHECK(via_erfc == doctest::Approx(chi2_df1_pvalue_oracle(stat)).epsilon(1e-6));
    }
    CHECK(std::erfc(std::sqrt(3.841458820694124 / 2.0)) ==
          doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("strongly imbalanced fractional table: frozen statistic") {
    // fractional counts are legal: averaged tables are tested as-is
    ChiSquaredResult r = chi_squared_test(table_of(124, 56, 30.2, 149.8));
    CHECK(r.statistic == doctest::Approx(99.81100611450807).epsilon(1e-9));
    CHECK(r.p_value == doctest::Approx(1.676559745756811e-23).epsilon(1e-6));
    CHECK_FALSE(r.corrected);
    CHECK(r.p_value < 1e-15);
}

TEST_CASE("yates correction triggers exactly when an expected count is below 5") {
    // expected cells of [[3,7],[8,2]] include 4.5 < 5
    ChiSquaredResult small = chi_squared_test(table_of(3, 7, 8, 2));
    CHECK(small.corrected);
    CHECK(small.statistic == doctest::Approx(3.2323232323232323).epsilon(1e-9));
    CHECK(small.p_value == doctest::Approx(0.07219819770165764).epsilon(1e-9));
    CHECK(small.uncorrected_statistic == doctest::Approx(5.05050505050505).epsilon(1e-9));
    CHECK(small.uncorrected_p_value ==
          doctest::Approx(0.024618761380815177).epsilon(1e-9));

    // scale the same proportions up: no correction, same uncorrected shape
    ChiSquaredResult large = chi_squared_test(table_of(30, 70, 80, 20));
    CHECK_FALSE(large.corrected);
    CHECK(large.statistic == doctest::Approx(large.uncorrected_statistic));
    CHECK(large.statistic ==
          doctest::Approx(10.0 * small.uncorrected_statistic).epsilon(1e-9));
}

TEST_CASE("test is invariant to swapping rows or columns") {
    ChiSquaredResult base = chi_squared_test(table_of(12, 30, 25, 9));
    ChiSquaredResult rows = chi_squared_test(table_of(25, 9, 12, 30));
    ChiSquaredResult cols = chi_squared_test(table_of(30, 12, 9, 25));
    CHECK(base.statistic == doctest::Approx(rows.statistic).epsilon(1e-12));
    CHECK(base.statistic == doctest::Approx(cols.statistic).epsilon(1e-12));
    CHECK(base.p_value == doctest::Approx(rows.p_value).epsilon(1e-12));
}

TEST_CASE("larger statistic means smaller p-value") {
    double prev = 1.1;
    for (double stat : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        double p = std::erfc(std::sqrt(stat / 2.0));
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("degenerate margins are rejected") {
    CHECK_THROWS_AS(chi_squared_test(table_of(0, 0, 5, 5)), UndefinedTest);
    CHECK_THROWS_AS(chi_squared_test(table_of(5, 0, 5, 0)), UndefinedTest);
    CHECK_THROWS_AS(chi_squared_test(table_of(0, 0, 0, 0)), UndefinedTest);
}

TEST_CASE("retention curve: no censoring, monotone, exact fractions") {
    std::vector<int> days = {14, 14, 7, 3, 1};
    std::vector<double> km = kaplan_meier(days, 14);
    REQUIRE(km.size() == 14);
    CHECK(km[0] == doctest::Approx(1.0));           // everyone reaches day 1
    CHECK(km[1] == doctest::Approx(4.0 / 5));       // day 2: the 1-day patient left
    CHECK(km[3] == doctest::Approx(3.0 / 5));       // day 4
    CHECK(km[7] == doctest::Approx(2.0 / 5));       // day 8
    CHECK(km[13] == doctest::Approx(2.0 / 5));      // completers stay to day 14
    for (std::size_t d = 1; d < km.size(); ++d) CHECK(km[d] <= km[d - 1]);
}

TEST_CASE("retention curve of completers only is flat at one") {
    std::vector<double> km = kaplan_meier({14, 14, 14}, 14);
    for (double v : km) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("adverse-effect curve averages over patients still present") {
    PatientRecord a;
    a.participation_days = 2;
    a.adverse_effects_by_day = {3, 1};
    PatientRecord b;
    b.participation_days = 14;
    b.adverse_effects_by_day = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    std::vector<double> curve = adverse_curve({a, b});
    REQUIRE(curve.size() == 14);
    CHECK(curve[0] == doctest::Approx(2.0));  // (3 + 1) / 2
    CHECK(curve[1] == doctest::Approx(1.0));  // (1 + 1) / 2
    CHECK(curve[2] == doctest::Approx(1.0));  // only b is present
    CHECK(curve[13] == doctest::Approx(1.0));
    // empty day contributes zero
    std::vector<double> none = adverse_curve({a});
    CHECK(none[5] == doctest::Approx(0.0));
}

TEST_CASE("craving summary is the unweighted mean of both scores") {
    PatientRecord a;
    a.arsw_score = 10.0;
    a.vas_score = 40.0;
    PatientRecord b;
    b.arsw_score = 30.0;
    b.vas_score = 20.0;
    auto [arsw, vas] = craving_summary({a, b});
    CHECK(arsw == doctest::Approx(20.0));
    CHECK(vas == doctest::Approx(30.0));
}

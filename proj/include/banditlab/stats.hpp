#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace banditlab {

struct UndefinedTest : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// 2x2 treatment-by-outcome counts. Fractional counts are allowed because
// tables averaged over many simulations are tested as-is.
struct ContingencyTable2x2 {
    // cells[row][col], rows = arms, cols = {success, failure}
    std::array<std::array<double, 2>, 2> cells{};

    double row_total(std::size_t r) const { return cells[r][0] + cells[r][1]; }
    double col_total(std::size_t c) const { return cells[0][c] + cells[1][c]; }
    double grand_total() const { return row_total(0) + row_total(1); }
};

struct ChiSquaredResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool corrected = false;
    // Uncorrected companion values; equal to the above when no correction
    // was applied.
    double uncorrected_statistic = 0.0;
    double uncorrected_p_value = 1.0;
};

// Chi-squared test of independence with 1 degree of freedom. Yates'
// continuity correction is applied when any expected cell count is below 5.
// The p-value is computed via the complementary error function, which is
// exact for df = 1.
ChiSquaredResult chi_squared_test(const ContingencyTable2x2& table);

// Retention curve: value at day d (1-based) is the fraction of patients
// with participation_days >= d. No censoring.
std::vector<double> kaplan_meier(const std::vector<int>& participation_days,
                                 int horizon = 14);

// Per-day average adverse effects over the patients still present that day;
// an empty day (nobody present) contributes 0.
struct PatientRecord;  // defined in trial.hpp
std::vector<double> adverse_curve(const std::vector<PatientRecord>& records);

// Unweighted per-patient means of the two craving scores.
std::pair<double, double> craving_summary(const std::vector<PatientRecord>& records);

}  // namespace banditlab

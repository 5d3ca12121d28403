#include "banditlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "banditlab/trial.hpp"

namespace banditlab {

namespace {

double chi_squared_statistic(const ContingencyTable2x2& table, double correction) {
    double total = table.grand_total();
    double stat = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            double expected = table.row_total(r) * table.col_total(c) / total;
            double dev = std::max(std::abs(table.cells[r][c] - expected) - correction, 0.0);
            stat += dev * dev / expected;
        }
    }
    return stat;
}

// Upper tail of the chi-squared distribution with one degree of freedom.
double chi_squared_p_df1(double statistic) {
    return std::erfc(std::sqrt(statistic / 2.0));
}

}  // namespace

ChiSquaredResult chi_squared_test(const ContingencyTable2x2& table) {
    double total = table.grand_total();
    if (total <= 0.0) throw UndefinedTest("contingency table is empty");
    for (std::size_t i = 0; i < 2; ++i) {
        if (table.row_total(i) <= 0.0 || table.col_total(i) <= 0.0)
            throw UndefinedTest("degenerate contingency margin");
    }
    bool small_expected = false;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            if (table.row_total(r) * table.col_total(c) / total < 5.0)
                small_expected = true;

    ChiSquaredResult result;
    result.uncorrected_statistic = chi_squared_statistic(table, 0.0);
    result.uncorrected_p_value = chi_squared_p_df1(result.uncorrected_statistic);
    result.corrected = small_expected;
    if (small_expected) {
        result.statistic = chi_squared_statistic(table, 0.5);
        result.p_value = chi_squared_p_df1(result.statistic);
    } else {
        result.statistic = result.uncorrected_statistic;
        result.p_value = result.uncorrected_p_value;
    }
    return result;
}

std::vector<double> kaplan_meier(const std::vector<int>& participation_days,
                                 int horizon) {
    if (participation_days.empty())
        throw UndefinedTest("Kaplan-Meier curve of an empty cohort is undefined");
    std::vector<double> curve(static_cast<std::size_t>(horizon));
    double n = static_cast<double>(participation_days.size());
    for (int d = 1; d <= horizon; ++d) {
        std::size_t still_in = 0;
        for (int p : participation_days)
            if (p >= d) ++still_in;
        curve[static_cast<std::size_t>(d - 1)] = static_cast<double>(still_in) / n;
    }
    return curve;
}

std::vector<double> adverse_curve(const std::vector<PatientRecord>& records) {
    std::vector<double> curve(kTreatmentDays, 0.0);
    for (int d = 1; d <= kTreatmentDays; ++d) {
        double effects = 0.0;
        std::size_t present = 0;
        for (const PatientRecord& rec : records) {
            if (rec.participation_days >= d) {
                ++present;
                effects += rec.adverse_effects_by_day[static_cast<std::size_t>(d - 1)];
            }
        }
        curve[static_cast<std::size_t>(d - 1)] =
            present > 0 ? effects / static_cast<double>(present) : 0.0;
    }
    return curve;
}

std::pair<double, double> craving_summary(const std::vector<PatientRecord>& records) {
    if (records.empty())
        throw UndefinedTest("craving summary of an empty cohort is undefined");
    double arsw = 0.0, vas = 0.0;
    for (const PatientRecord& rec : records) {
        arsw += rec.arsw_score;
        vas += rec.vas_score;
    }
    double n = static_cast<double>(records.size());
    return {arsw / n, vas / n};
}

}  // namespace banditlab

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "banditlab/policies.hpp"
#include "banditlab/rng.hpp"
#include "banditlab/stats.hpp"

namespace banditlab {

inline constexpr int kTreatmentDays = 14;

enum class Treatment { Bupnal, Clon };

struct PopulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse failure with the offending row (1-based, header = row 1) and column.
struct PopulationParseError : PopulationError {
    PopulationParseError(std::size_t row, const std::string& column,
                         const std::string& message);
    std::size_t row;
    std::string column;
};

struct PatientRecord {
    Treatment treatment = Treatment::Bupnal;
    bool success = false;
    int participation_days = kTreatmentDays;  // in [1, 14]
    std::array<int, kTreatmentDays> adverse_effects_by_day{};
    double arsw_score = 0.0;
    double vas_score = 0.0;
};

// Checks the record invariants; returns a diagnostic or empty on success.
std::string validate_record(const PatientRecord& record);

struct TreatmentPopulation {
    std::vector<PatientRecord> bupnal;
    std::vector<PatientRecord> clon;

    const std::vector<PatientRecord>& records(Treatment t) const {
        return t == Treatment::Bupnal ? bupnal : clon;
    }
    double success_rate(Treatment t) const;
};

// CSV schema (header required):
//   treatment,success,participation_days,ae_d1..ae_d14,arsw,vas
TreatmentPopulation load_population(const std::string& path);
TreatmentPopulation load_population(std::istream& in);
void save_population(const TreatmentPopulation& population, std::ostream& out);

// Target statistics for one synthetic arm.
struct SyntheticArmProfile {
    double success_rate = 0.5;
    double arsw_mean = 0.0;
    double vas_mean = 0.0;
    // Expected adverse-effect count per present patient, per treatment day.
    std::array<double, kTreatmentDays> adverse_daily_rate{};
    // Relative weights of participation day 1..14 for treatment failures.
    std::array<double, kTreatmentDays> dropout_weights{};
};

struct SyntheticTrialProfile {
    SyntheticArmProfile bupnal;
    SyntheticArmProfile clon;
};

// Profiles calibrated so that 1:1 randomization over the generated
// populations reproduces the reference trial's contingency rows, craving
// means, and retention behavior.
SyntheticTrialProfile in_patient_profile();
SyntheticTrialProfile out_patient_profile();

// Builds per-arm record populations whose empirical success rate matches
// the profile exactly (success counts are quota-rounded, then shuffled).
TreatmentPopulation generate_synthetic_population(const SyntheticTrialProfile& profile,
                                                  std::size_t size_per_arm, Rng& rng);

struct FixedRandomization {
    double bupnal_weight = 1.0;
    double clon_weight = 1.0;
};

struct BanditStrategy {
    PolicyConfig policy;
};

using AllocationStrategy = std::variant<FixedRandomization, BanditStrategy>;

std::string strategy_name(const AllocationStrategy& strategy);

struct TrialConfig {
    std::size_t patient_count = 360;
    std::size_t accrual_weeks = 30;
    int feedback_delay_days = 14;
    AllocationStrategy strategy = FixedRandomization{};
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrialResult {
    ContingencyTable2x2 contingency;  // rows: bupnal, clon; cols: success, failure
    double treated_total = 0.0;
    std::vector<double> treated_per_day;  // successes by admission day
    std::vector<double> km_curve;         // 14 entries
    std::vector<double> adverse_curve;    // 14 entries
    double mean_arsw = 0.0;
    double mean_vas = 0.0;
    double p_value = 1.0;
    bool p_corrected = false;
    double uncorrected_p_value = 1.0;
};

// Event log for causality audits in tests.
struct TrialAuditEvent {
    enum class Kind { Assign, Feedback };
    Kind kind;
    int day;              // admission day (Assign) or application day (Feedback)
    std::size_t patient;  // patient index in admission order
};

// Draws one admission day per patient, uniform over the accrual period and
// snapped forward to the next Wednesday; returns them sorted ascending.
std::vector<int> schedule_arrivals(std::size_t patient_count,
                                   std::size_t accrual_weeks, Rng& rng);

// Replays one trial: patients in admission order, assignments by the
// configured strategy, outcomes bootstrapped from the assigned arm's
// population and fed back feedback_delay_days later.
TrialResult run_trial(const TrialConfig& config, const TreatmentPopulation& population,
                      Rng& rng, std::vector<TrialAuditEvent>* audit = nullptr);

// Independent repetitions with derived streams; all result fields are
// averaged element-wise and the averaged contingency table is tested once.
TrialResult repeat_trials(const TrialConfig& config,
                          const TreatmentPopulation& population,
                          std::size_t repetitions, unsigned threads = 1);

}  // namespace banditlab

#pragma once

#include "fbpr/model.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fbpr {

/// Fraction of results whose predicted option is the gold option. Results
/// are matched to questions by id; unknown or duplicated ids raise
/// IdMismatch.
double accuracy(const std::vector<RankingResult>& results, const std::vector<Question>& questions);

/// Histogram of the gold option's rank, index 0 holding rank 1.
std::array<std::size_t, kOptionCount> rank_histogram(const std::vector<RankingResult>& results,
                                                     const std::vector<Question>& questions);

struct StratumAccuracy {
    std::size_t n = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
};

std::map<StepDomain, StratumAccuracy> stratify(const std::vector<RankingResult>& results,
                                               const std::vector<Question>& questions);

struct CertaintyAnalysis {
    double threshold = 0.99;
    std::optional<double> median_correct;
    std::optional<double> median_incorrect;
    double frac_above = 0.0;              // fraction with softmax_top1 > threshold
    std::optional<double> acc_above;      // accuracy within that fraction
    std::size_t n_above = 0;
};

CertaintyAnalysis certainty_analysis(const std::vector<RankingResult>& results,
                                     const std::vector<Question>& questions, double threshold);

/// A method's chosen option for one question; empty means the method failed
/// to produce an option (scored incorrect, and distinct from every letter
/// choice when measuring agreement).
struct MethodPrediction {
    std::string question_id;
    std::optional<int> choice;
};

inline constexpr int kChoiceCategories = kOptionCount + 1; // A-E plus "none"

struct AgreementReport {
    std::size_t n = 0;
    // Raw counts; the fractions below derive from them exactly.
    std::size_t count_joint = 0;
    std::size_t count_only_a = 0;
    std::size_t count_only_b = 0;
    std::size_t count_neither = 0;
    std::size_t count_agree = 0;
    std::size_t count_agree_correct = 0;

    double acc_a = 0.0;
    double acc_b = 0.0;
    double joint_accuracy = 0.0;
    double only_a = 0.0;
    double only_b = 0.0;
    double neither = 0.0;
    double expected_joint = 0.0; // acc_a * acc_b
    double agreement_rate = 0.0;
    std::optional<double> agreement_accuracy; // correct | agree

    // [a correct][b correct] and [a choice][b choice] with index 5 = none.
    std::array<std::array<std::size_t, 2>, 2> correctness_matrix{};
    std::array<std::array<std::size_t, kChoiceCategories>, kChoiceCategories> choice_matrix{};
};

/// Joint accuracy, exclusive-correct splits, agreement rate/accuracy and the
/// two confusion matrices for two prediction sets over the same questions.
AgreementReport compare_methods(const std::vector<MethodPrediction>& a,
                                const std::vector<MethodPrediction>& b,
                                const std::vector<Question>& questions);

/// Median with midpoint averaging for even counts.
std::optional<double> median(std::vector<double> values);

struct ScoreReportInputs {
    std::string config_json; // effective configuration, embedded for provenance
    std::vector<RankingResult> results;
    std::vector<Question> questions;
    double certainty_threshold = 0.99;
};

/// Write report.json plus plot-data tables (rank histogram, softmax-by-
/// correctness) into out_dir. Returns the written paths. Output is
/// byte-deterministic for identical inputs.
std::vector<std::filesystem::path> emit_score_report(const ScoreReportInputs& inputs,
                                                     const std::filesystem::path& out_dir);

/// Write agreement.json plus confusion-matrix tables into out_dir.
std::vector<std::filesystem::path> emit_agreement_report(const std::string& config_json,
                                                         const AgreementReport& report,
                                                         const std::filesystem::path& out_dir);

} // namespace fbpr

#include "fbpr/evaluation.hpp"

#include "fbpr/error.hpp"
#include "fbpr/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fbpr {

using nlohmann::json;

namespace {

std::unordered_map<std::string, const Question*>
question_index(const std::vector<Question>& questions) {
    std::unordered_map<std::string, const Question*> index;
    for (const Question& q : questions) {
        if (!index.emplace(q.id, &q).second) {
            throw Error(Errc::IdMismatch, "duplicate question id '" + q.id + "'");
        }
    }
    return index;
}

const Question& question_for(const std::unordered_map<std::string, const Question*>& index,
                             const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) {
        throw Error(Errc::IdMismatch, "no question with id '" + id + "'");
    }
    return *it->second;
}

void check_unique_result_ids(const std::vector<RankingResult>& results) {
    std::set<std::string> seen;
    for (const RankingResult& r : results) {
        if (!seen.insert(r.question_id).second) {
            throw Error(Errc::IdMismatch, "duplicate result id '" + r.question_id + "'");
        }
    }
}

} // namespace

double accuracy(const std::vector<RankingResult>& results,
                const std::vector<Question>& questions) {
    if (results.empty()) return 0.0;
    check_unique_result_ids(results);
    const auto index = question_index(questions);
    std::size_t correct = 0;
    for (const RankingResult& r : results) {
        if (r.predicted_index == question_for(index, r.question_id).gold_index) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(results.size());
}

std::array<std::size_t, kOptionCount> rank_histogram(const std::vector<RankingResult>& results,
                                                     const std::vector<Question>& questions) {
    check_unique_result_ids(results);
    const auto index = question_index(questions);
    std::array<std::size_t, kOptionCount> histogram{};
    for (const RankingResult& r : results) {
        const int rank = gold_rank_of(r, question_for(index, r.question_id).gold_index);
        if (rank >= 1 && rank <= kOptionCount) ++histogram[rank - 1];
    }
    return histogram;
}

std::map<StepDomain, StratumAccuracy> stratify(const std::vector<RankingResult>& results,
                                               const std::vector<Question>& questions) {
    check_unique_result_ids(results);
    const auto index = question_index(questions);
    std::map<StepDomain, StratumAccuracy> strata;
    for (const RankingResult& r : results) {
        const Question& q = question_for(index, r.question_id);
        StratumAccuracy& s = strata[q.step_domain];
        ++s.n;
        if (r.predicted_index == q.gold_index) ++s.correct;
    }
    for (auto& [domain, s] : strata) {
        s.accuracy = s.n ? static_cast<double>(s.correct) / static_cast<double>(s.n) : 0.0;
    }
    return strata;
}

std::optional<double> median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

CertaintyAnalysis certainty_analysis(const std::vector<RankingResult>& results,
                                     const std::vector<Question>& questions, double threshold) {
    check_unique_result_ids(results);
    const auto index = question_index(questions);
    CertaintyAnalysis out;
    out.threshold = threshold;

    std::vector<double> correct_scores;
    std::vector<double> incorrect_scores;
    std::size_t above = 0;
    std::size_t above_correct = 0;
    for (const RankingResult& r : results) {
        const bool correct = r.predicted_index == question_for(index, r.question_id).gold_index;
        (correct ? correct_scores : incorrect_scores).push_back(r.softmax_top1);
        if (r.softmax_top1 > threshold) {
            ++above;
            if (correct) ++above_correct;
        }
    }
    out.median_correct = median(std::move(correct_scores));
    out.median_incorrect = median(std::move(incorrect_scores));
    out.n_above = above;
    out.frac_above =
        results.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(results.size());
    if (above > 0) {
        out.acc_above = static_cast<double>(above_correct) / static_cast<double>(above);
    }
    return out;
}

AgreementReport compare_methods(const std::vector<MethodPrediction>& a,
                                const std::vector<MethodPrediction>& b,
                                const std::vector<Question>& questions) {
    std::unordered_map<std::string, std::optional<int>> b_by_id;
    for (const MethodPrediction& p : b) {
        if (!b_by_id.emplace(p.question_id, p.choice).second) {
            throw Error(Errc::IdMismatch, "duplicate prediction id '" + p.question_id + "'");
        }
    }
    if (a.size() != b.size()) {
        throw Error(Errc::IdMismatch, "prediction sets differ in size (" + std::to_string(a.size()) +
                                          " vs " + std::to_string(b.size()) + ")");
    }
    const auto index = question_index(questions);

    AgreementReport report;
    report.n = a.size();
    std::set<std::string> seen_a;
    for (const MethodPrediction& pa : a) {
        if (!seen_a.insert(pa.question_id).second) {
            throw Error(Errc::IdMismatch, "duplicate prediction id '" + pa.question_id + "'");
        }
        auto itb = b_by_id.find(pa.question_id);
        if (itb == b_by_id.end()) {
            throw Error(Errc::IdMismatch,
                        "prediction id '" + pa.question_id + "' is missing from the second set");
        }
        const std::optional<int>& choice_a = pa.choice;
        const std::optional<int>& choice_b = itb->second;
        const int gold = question_for(index, pa.question_id).gold_index;

        const bool correct_a = choice_a.has_value() && *choice_a == gold;
        const bool correct_b = choice_b.has_value() && *choice_b == gold;
        const bool agree = choice_a == choice_b; // two "none" answers agree

        if (correct_a && correct_b) ++report.count_joint;
        else if (correct_a) ++report.count_only_a;
        else if (correct_b) ++report.count_only_b;
        else ++report.count_neither;
        if (agree) {
            ++report.count_agree;
            if (correct_a && correct_b) ++report.count_agree_correct;
        }
        ++report.correctness_matrix[correct_a ? 1 : 0][correct_b ? 1 : 0];
        ++report.choice_matrix[choice_a.value_or(kOptionCount)][choice_b.value_or(kOptionCount)];
    }

    const double n = static_cast<double>(report.n);
    if (report.n > 0) {
        report.acc_a = static_cast<double>(report.count_joint + report.count_only_a) / n;
        report.acc_b = static_cast<double>(report.count_joint + report.count_only_b) / n;
        report.joint_accuracy = static_cast<double>(report.count_joint) / n;
        report.only_a = static_cast<double>(report.count_only_a) / n;
        report.only_b = static_cast<double>(report.count_only_b) / n;
        report.neither = static_cast<double>(report.count_neither) / n;
        report.expected_joint = report.acc_a * report.acc_b;
        report.agreement_rate = static_cast<double>(report.count_agree) / n;
        if (report.count_agree > 0) {
            report.agreement_accuracy = static_cast<double>(report.count_agree_correct) /
                                        static_cast<double>(report.count_agree);
        }
    }
    return report;
}

namespace {

json config_as_json(const std::string& config_json) {
    json parsed = json::parse(config_json, nullptr, false);
    if (parsed.is_discarded()) return json(config_json);
    return parsed;
}

json strata_to_json(const std::map<StepDomain, StratumAccuracy>& strata) {
    json out = json::object();
    for (const auto& [domain, s] : strata) {
        out[to_string(domain)] =
            json{{"n", s.n}, {"correct", s.correct}, {"accuracy", s.accuracy}};
    }
    return out;
}

json certainty_to_json(const CertaintyAnalysis& c) {
    json out;
    out["threshold"] = c.threshold;
    out["median_correct"] = c.median_correct ? json(*c.median_correct) : json(nullptr);
    out["median_incorrect"] = c.median_incorrect ? json(*c.median_incorrect) : json(nullptr);
    out["frac_above"] = c.frac_above;
    out["n_above"] = c.n_above;
    out["acc_above"] = c.acc_above ? json(*c.acc_above) : json(nullptr);
    return out;
}

} // namespace

std::vector<std::filesystem::path> emit_score_report(const ScoreReportInputs& inputs,
                                                     const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    const auto index = question_index(inputs.questions);
    const auto histogram = rank_histogram(inputs.results, inputs.questions);
    const auto strata = stratify(inputs.results, inputs.questions);
    const auto certainty =
        certainty_analysis(inputs.results, inputs.questions, inputs.certainty_threshold);

    json per_question = json::array();
    for (const RankingResult& r : inputs.results) {
        const Question& q = question_for(index, r.question_id);
        per_question.push_back(json{{"id", r.question_id},
                                    {"predicted_index", r.predicted_index},
                                    {"gold_index", q.gold_index},
                                    {"correct", r.predicted_index == q.gold_index},
                                    {"gold_rank", gold_rank_of(r, q.gold_index)},
                                    {"softmax_top1", r.softmax_top1},
                                    {"step", to_string(q.step_domain)}});
    }

    json report;
    report["config"] = config_as_json(inputs.config_json);
    report["aggregates"] = json{{"n", inputs.results.size()},
                                {"accuracy", accuracy(inputs.results, inputs.questions)},
                                {"rank_histogram", histogram},
                                {"strata", strata_to_json(strata)},
                                {"certainty", certainty_to_json(certainty)}};
    report["per_question"] = per_question;

    std::vector<std::filesystem::path> written;
    const auto report_path = out_dir / "report.json";
    write_file_atomic(report_path, report.dump(2) + "\n");
    written.push_back(report_path);

    std::ostringstream rank_tsv;
    rank_tsv << "rank\tcount\n";
    for (int rank = 1; rank <= kOptionCount; ++rank) {
        rank_tsv << rank << "\t" << histogram[rank - 1] << "\n";
    }
    const auto rank_path = out_dir / "rank_histogram.tsv";
    write_file_atomic(rank_path, rank_tsv.str());
    written.push_back(rank_path);

    // Softmax certainty distribution, stacked by correctness. 5-way softmax
    // top-1 lives in [0.2, 1].
    constexpr int kBins = 16;
    std::array<std::size_t, kBins> correct_bins{};
    std::array<std::size_t, kBins> incorrect_bins{};
    for (const RankingResult& r : inputs.results) {
        const Question& q = question_for(index, r.question_id);
        int bin = static_cast<int>((r.softmax_top1 - 0.2) / 0.05);
        bin = std::clamp(bin, 0, kBins - 1);
        if (r.predicted_index == q.gold_index) ++correct_bins[bin];
        else ++incorrect_bins[bin];
    }
    std::ostringstream softmax_tsv;
    softmax_tsv << "bin_lo\tbin_hi\tcorrect\tincorrect\n";
    for (int b = 0; b < kBins; ++b) {
        softmax_tsv << 0.2 + 0.05 * b << "\t" << 0.2 + 0.05 * (b + 1) << "\t" << correct_bins[b]
                    << "\t" << incorrect_bins[b] << "\n";
    }
    const auto softmax_path = out_dir / "softmax_by_correctness.tsv";
    write_file_atomic(softmax_path, softmax_tsv.str());
    written.push_back(softmax_path);

    return written;
}

std::vector<std::filesystem::path> emit_agreement_report(const std::string& config_json,
                                                         const AgreementReport& report,
                                                         const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    json j;
    j["config"] = config_as_json(config_json);
    j["n"] = report.n;
    j["acc_a"] = report.acc_a;
    j["acc_b"] = report.acc_b;
    j["joint_accuracy"] = report.joint_accuracy;
    j["only_a"] = report.only_a;
    j["only_b"] = report.only_b;
    j["neither"] = report.neither;
    j["expected_joint"] = report.expected_joint;
    j["agreement_rate"] = report.agreement_rate;
    j["agreement_accuracy"] =
        report.agreement_accuracy ? json(*report.agreement_accuracy) : json(nullptr);
    j["counts"] = json{{"joint", report.count_joint},
                       {"only_a", report.count_only_a},
                       {"only_b", report.count_only_b},
                       {"neither", report.count_neither},
                       {"agree", report.count_agree},
                       {"agree_correct", report.count_agree_correct}};

    std::vector<std::filesystem::path> written;
    const auto json_path = out_dir / "agreement.json";
    write_file_atomic(json_path, j.dump(2) + "\n");
    written.push_back(json_path);

    std::ostringstream choice_tsv;
    choice_tsv << "a\\b";
    for (int c = 0; c < kChoiceCategories; ++c) {
        choice_tsv << "\t" << (c < kOptionCount ? std::string(1, static_cast<char>('A' + c))
                                                : std::string("none"));
    }
    choice_tsv << "\n";
    for (int r = 0; r < kChoiceCategories; ++r) {
        choice_tsv << (r < kOptionCount ? std::string(1, static_cast<char>('A' + r))
                                        : std::string("none"));
        for (int c = 0; c < kChoiceCategories; ++c) {
            choice_tsv << "\t" << report.choice_matrix[r][c];
        }
        choice_tsv << "\n";
    }
    const auto choice_path = out_dir / "choice_confusion.tsv";
    write_file_atomic(choice_path, choice_tsv.str());
    written.push_back(choice_path);

    std::ostringstream corr_tsv;
    corr_tsv << "a\\b\tb_incorrect\tb_correct\n";
    corr_tsv << "a_incorrect\t" << report.correctness_matrix[0][0] << "\t"
             << report.correctness_matrix[0][1] << "\n";
    corr_tsv << "a_correct\t" << report.correctness_matrix[1][0] << "\t"
             << report.correctness_matrix[1][1] << "\n";
    const auto corr_path = out_dir / "correctness_confusion.tsv";
    write_file_atomic(corr_path, corr_tsv.str());
    written.push_back(corr_path);

    return written;
}

} // namespace fbpr

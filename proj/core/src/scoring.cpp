#include "fbpr/scoring.hpp"

#include "fbpr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fbpr {

AdjustedPair adjusted_pair_count(NegationMode mode, Polarity polarity, std::uint64_t c_d,
                                 std::uint64_t c_dx) {
    if (polarity == Polarity::Affirmed) {
        return AdjustedPair{true, c_dx};
    }
    switch (mode) {
    case NegationMode::IgnoreNegated:
        return AdjustedPair{false, 0};
    case NegationMode::PolarityAgnostic:
        return AdjustedPair{true, c_dx};
    case NegationMode::RewardAbsence:
        return AdjustedPair{true, c_dx >= c_d ? 0 : c_d - c_dx};
    }
    return AdjustedPair{true, c_dx};
}

double score_option(std::uint64_t c_d, const std::vector<std::uint64_t>& included_pairs,
                    double delta) {
    if (!(delta > 0.0)) {
        throw Error(Errc::ConfigError, "laplace delta must be positive");
    }
    double score = 0.0;
    for (std::uint64_t c : included_pairs) {
        score += std::log(static_cast<double>(c) + delta);
    }
    const double k_prime = static_cast<double>(included_pairs.size());
    score -= (k_prime - 1.0) * std::log(static_cast<double>(c_d) + delta);
    return score;
}

std::array<double, kOptionCount> softmax_scores(const std::array<double, kOptionCount>& scores) {
    const double max_score = *std::max_element(scores.begin(), scores.end());
    std::array<double, kOptionCount> out{};
    double denom = 0.0;
    for (int i = 0; i < kOptionCount; ++i) {
        out[i] = std::exp(scores[i] - max_score);
        denom += out[i];
    }
    for (double& v : out) v /= denom;
    return out;
}

RankingResult rank_options(const CountBundle& bundle, const ConceptSet& concepts,
                           const ScoringConfig& config) {
    RankingResult result;
    result.question_id = bundle.question_id;
    result.scoring_mode = config.mode;
    result.delta = config.delta;

    for (int d = 0; d < kOptionCount; ++d) {
        if (bundle.pairs[d].size() != concepts.concepts.size()) {
            throw Error(Errc::CountMismatch,
                        "bundle '" + bundle.question_id + "' option " + std::to_string(d) +
                            " carries " + std::to_string(bundle.pairs[d].size()) +
                            " pair counts for " + std::to_string(concepts.concepts.size()) +
                            " concepts");
        }
        std::vector<std::uint64_t> included;
        included.reserve(concepts.concepts.size());
        for (std::size_t i = 0; i < concepts.concepts.size(); ++i) {
            const AdjustedPair adjusted =
                adjusted_pair_count(config.mode, concepts.concepts[i].polarity,
                                    bundle.diagnosis[d].count, bundle.pairs[d][i].count);
            if (adjusted.included) {
                included.push_back(adjusted.c_prime);
            }
        }
        result.scores[d] = score_option(bundle.diagnosis[d].count, included, config.delta);
    }

    int best = 0;
    for (int d = 1; d < kOptionCount; ++d) {
        if (result.scores[d] > result.scores[best]) best = d;
    }
    result.predicted_index = best;

    std::array<int, kOptionCount> order{};
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (result.scores[a] != result.scores[b]) return result.scores[a] > result.scores[b];
        return a < b;
    });
    for (int pos = 0; pos < kOptionCount; ++pos) {
        result.ranks[order[pos]] = pos + 1;
    }

    result.softmax_top1 = softmax_scores(result.scores)[best];
    return result;
}

} // namespace fbpr

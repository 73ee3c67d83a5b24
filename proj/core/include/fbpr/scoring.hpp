#pragma once

#include "fbpr/model.hpp"

#include <cstdint>
#include <vector>

namespace fbpr {

struct ScoringConfig {
    double delta = 1.0; // Laplace smoothing, > 0
    NegationMode mode = NegationMode::IgnoreNegated;
    // Ties always go to the lowest option index.
};

struct AdjustedPair {
    bool included = false;
    std::uint64_t c_prime = 0;
};

/// Apply the negation policy to one (diagnosis, concept) count.
///   IgnoreNegated:    negated concepts drop out of the score.
///   PolarityAgnostic: polarity labels are disregarded.
///   RewardAbsence:    negated concepts contribute C(d) - C(d,x), floored at 0.
AdjustedPair adjusted_pair_count(NegationMode mode, Polarity polarity, std::uint64_t c_d,
                                 std::uint64_t c_dx);

/// Smoothed log score for one candidate:
///   sum_i log(c'_i + delta) - (k'-1) * log(C(d) + delta).
/// With no included pairs this reduces to log(C(d) + delta), the prior alone.
double score_option(std::uint64_t c_d, const std::vector<std::uint64_t>& included_pairs,
                    double delta);

/// Score all five options of a bundle, pick the argmax (lowest index wins
/// ties), rank options by descending score, and attach the softmax of the
/// top score as certainty. gold_rank is left undefined (0); callers holding
/// the gold index attach it via gold_rank_of.
RankingResult rank_options(const CountBundle& bundle, const ConceptSet& concepts,
                           const ScoringConfig& config);

/// Numerically stable 5-way softmax (max subtracted before exponentiation).
std::array<double, kOptionCount> softmax_scores(const std::array<double, kOptionCount>& scores);

} // namespace fbpr

#pragma once

// Brute-force counting oracles, deliberately independent of the library's
// postings index and query planner. Matching semantics are re-derived from
// scratch: a literal (leading space included) matches a run of whitespace
// tokens whose raw byte span equals the literal core.

#include "fbpr/model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fbpr::testing {

/// Occurrences of one literal in one document (token-run scan).
std::uint64_t naive_literal_occurrences(const std::string& doc, const std::string& literal);

/// Occurrence total of any variant over all docs (variants summed, as an
/// OR clause does).
std::uint64_t naive_unary_count(const std::vector<std::string>& docs,
                                const std::vector<std::string>& variants);

/// True when the doc holds at least one occurrence from the variant list.
bool naive_doc_matches_any(const std::string& doc, const std::vector<std::string>& variants);

/// Document-level co-occurrence count: docs matching some diagnosis variant
/// AND some concept variant.
std::uint64_t naive_pair_doc_count(const std::vector<std::string>& docs,
                                   const std::vector<std::string>& diagnosis_variants,
                                   const std::vector<std::string>& concept_variants);

/// Document-level CNF count: docs matching every clause.
std::uint64_t naive_cnf_doc_count(const std::vector<std::string>& docs,
                                  const std::vector<std::vector<std::string>>& cnf);

/// Exact smoothed-posterior argmax over five options, computed with integer
/// arithmetic (delta = delta_num/delta_den). Counts come from the naive
/// scanners above, with surface-form expansion applied to options and
/// concepts exactly as the pipeline does, but with no query planning or
/// chunking. Ties go to the lowest index.
int exact_posterior_argmax(const std::vector<std::string>& docs,
                           const std::array<std::string, kOptionCount>& options,
                           const std::vector<Concept>& concepts, long delta_num, long delta_den,
                           NegationMode mode);

/// True when two options with different (C(d), adjusted-count vector)
/// profiles tie exactly under the given smoothing; such questions make the
/// float-vs-exact argmax comparison ill-posed.
bool has_cross_profile_tie(const std::vector<std::string>& docs,
                           const std::array<std::string, kOptionCount>& options,
                           const std::vector<Concept>& concepts, long delta_num, long delta_den,
                           NegationMode mode);

} // namespace fbpr::testing

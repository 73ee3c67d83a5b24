#pragma once

#include "fbpr/surface_forms.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fbpr {

class CountBackend;

inline constexpr int kMaxOrComponents = 4;
inline constexpr int kMaxWindowTokens = 1000;

/// One backend-legal count request: a positive CNF whose OR-clauses hold at
/// most four literals, evaluated within a token window.
struct CountQuery {
    std::vector<std::vector<std::string>> cnf;
    int window_tokens = kMaxWindowTokens;
    std::string corpus_id;

    bool operator==(const CountQuery&) const = default;
};

/// Throws on clause-size, window, or emptiness violations.
void validate_query(const CountQuery& query);

struct PlanTerm {
    int sign = +1; // +1 or -1
    CountQuery query;

    bool operator==(const PlanTerm&) const = default;
};

/// A signed combination of backend-legal queries whose sum evaluates the
/// intended count.
struct QueryPlan {
    std::vector<PlanTerm> terms;
    std::string description;
};

struct PlanOptions {
    int window_tokens = kMaxWindowTokens;
    std::string corpus_id;
    std::size_t term_budget = 256;
};

/// Occurrence count of any variant: chunk the variants into OR-clauses of at
/// most four literals and sum the chunk counts.
QueryPlan plan_unary_count(const VariantSet& variants, const PlanOptions& options = {});

/// Document-level co-occurrence count of (any diagnosis variant) AND (any
/// concept variant). When either side needs more than one chunk, the union
/// over chunk pairs is expanded by inclusion-exclusion; terms with identical
/// clause sets are merged, which leaves every emitted coefficient at +/-1.
///
/// Throws Error{PlanTooLarge} when the merged expansion would exceed
/// options.term_budget.
QueryPlan plan_pair_count(const VariantSet& diagnosis, const VariantSet& concept_variants,
                          const PlanOptions& options = {});

struct PlanValue {
    std::uint64_t count = 0;
    bool approx = false;
    bool clamped = false; // the signed sum went negative and was clamped to 0
};

/// Signed sum of the term counts, clamped at zero. Approximation flags of the
/// terms are OR-ed together. Backend failures propagate as BackendError with
/// the failing term attached.
PlanValue evaluate_plan(const QueryPlan& plan, CountBackend& backend);

// Canonical text forms, stable across runs; used in cache keys and logs.
std::string serialize_query(const CountQuery& query); // {lit|lit;lit}
std::string serialize_term(const PlanTerm& term);     // (+|-) {lit|lit;lit}
std::string serialize_plan(const QueryPlan& plan);    // terms joined by one space

} // namespace fbpr

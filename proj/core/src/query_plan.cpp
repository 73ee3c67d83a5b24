#include "fbpr/query_plan.hpp"

#include "fbpr/counts.hpp"
#include "fbpr/error.hpp"

#include <bit>

namespace fbpr {

void validate_query(const CountQuery& query) {
    if (query.cnf.empty()) {
        throw Error(Errc::EmptyInput, "count query has no clauses");
    }
    if (query.window_tokens <= 0 || query.window_tokens > kMaxWindowTokens) {
        throw Error(Errc::BackendError,
                    "window of " + std::to_string(query.window_tokens) + " tokens is not backend-legal");
    }
    for (const auto& clause : query.cnf) {
        if (clause.empty() || clause.size() > kMaxOrComponents) {
            throw Error(Errc::BackendError,
                        "or-clause with " + std::to_string(clause.size()) + " literals is not backend-legal");
        }
    }
}

namespace {

std::vector<std::vector<std::string>> chunk_variants(const VariantSet& variants) {
    if (variants.variants.empty()) {
        throw Error(Errc::EmptyInput, "no variants to plan for '" + variants.source + "'");
    }
    std::vector<std::vector<std::string>> chunks;
    for (std::size_t i = 0; i < variants.variants.size(); i += kMaxOrComponents) {
        const std::size_t end = std::min(i + kMaxOrComponents, variants.variants.size());
        chunks.emplace_back(variants.variants.begin() + i, variants.variants.begin() + end);
    }
    return chunks;
}

} // namespace

QueryPlan plan_unary_count(const VariantSet& variants, const PlanOptions& options) {
    const auto chunks = chunk_variants(variants);
    QueryPlan plan;
    plan.description = "occurrences of '" + variants.source + "' as sum of " +
                       std::to_string(chunks.size()) + " or-clause chunk(s)";
    for (const auto& chunk : chunks) {
        CountQuery q;
        q.cnf = {chunk};
        q.window_tokens = options.window_tokens;
        q.corpus_id = options.corpus_id;
        validate_query(q);
        plan.terms.push_back(PlanTerm{+1, std::move(q)});
    }
    return plan;
}

QueryPlan plan_pair_count(const VariantSet& diagnosis, const VariantSet& concept_variants,
                          const PlanOptions& options) {
    const auto diag_chunks = chunk_variants(diagnosis);
    const auto concept_chunks = chunk_variants(concept_variants);
    const std::size_t m = diag_chunks.size();
    const std::size_t n = concept_chunks.size();

    const std::size_t term_count = ((std::size_t{1} << m) - 1) * ((std::size_t{1} << n) - 1);
    if (term_count > options.term_budget) {
        throw Error(Errc::PlanTooLarge,
                    "pair plan for '" + diagnosis.source + "' x '" + concept_variants.source + "' needs " +
                        std::to_string(term_count) + " terms (budget " +
                        std::to_string(options.term_budget) + ")");
    }

    QueryPlan plan;
    plan.description = "co-occurrences of '" + diagnosis.source + "' and '" + concept_variants.source +
                       "' via inclusion-exclusion over a " + std::to_string(m) + "x" +
                       std::to_string(n) + " chunk grid";

    // Inclusion-exclusion over union events A_ij = (chunk G_i AND chunk H_j),
    // with terms of identical clause set merged. The merged expansion runs
    // over nonempty chunk subsets (U, V) with coefficient (-1)^(|U|+|V|),
    // always +1 or -1.
    for (std::uint32_t u = 1; u < (1u << m); ++u) {
        for (std::uint32_t v = 1; v < (1u << n); ++v) {
            CountQuery q;
            for (std::size_t i = 0; i < m; ++i) {
                if (u & (1u << i)) q.cnf.push_back(diag_chunks[i]);
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (v & (1u << j)) q.cnf.push_back(concept_chunks[j]);
            }
            q.window_tokens = options.window_tokens;
            q.corpus_id = options.corpus_id;
            validate_query(q);
            const int sign = ((std::popcount(u) + std::popcount(v)) % 2 == 0) ? +1 : -1;
            plan.terms.push_back(PlanTerm{sign, std::move(q)});
        }
    }
    return plan;
}

PlanValue evaluate_plan(const QueryPlan& plan, CountBackend& backend) {
    __int128 sum = 0;
    bool approx = false;
    for (const PlanTerm& term : plan.terms) {
        CountResult r;
        try {
            r = backend.count(term.query);
        } catch (const Error& e) {
            throw Error(Errc::BackendError,
                        std::string(e.what()) + " [term " + serialize_term(term) + "]");
        }
        sum += static_cast<__int128>(term.sign) * static_cast<__int128>(r.count);
        approx = approx || r.approx;
    }
    PlanValue out;
    out.approx = approx;
    if (sum < 0) {
        out.count = 0;
        out.clamped = true;
    } else {
        out.count = static_cast<std::uint64_t>(sum);
    }
    return out;
}

std::string serialize_query(const CountQuery& query) {
    std::string out = "{";
    for (std::size_t c = 0; c < query.cnf.size(); ++c) {
        if (c > 0) out += ";";
        for (std::size_t l = 0; l < query.cnf[c].size(); ++l) {
            if (l > 0) out += "|";
            out += query.cnf[c][l];
        }
    }
    out += "}";
    return out;
}

std::string serialize_term(const PlanTerm& term) {
    return std::string(term.sign >= 0 ? "+" : "-") + " " + serialize_query(term.query);
}

std::string serialize_plan(const QueryPlan& plan) {
    std::string out;
    for (std::size_t i = 0; i < plan.terms.size(); ++i) {
        if (i > 0) out += " ";
        out += serialize_term(plan.terms[i]);
    }
    return out;
}

} // namespace fbpr

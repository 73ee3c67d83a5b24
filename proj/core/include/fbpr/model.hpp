#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fbpr {

inline constexpr int kOptionCount = 5;

enum class StepDomain { Step1, Step23, Unknown };
enum class Polarity { Affirmed, Negated };
enum class KMode { FixedFive, Unrestricted };
enum class NegationMode { IgnoreNegated, PolarityAgnostic, RewardAbsence };

const char* to_string(StepDomain v);
const char* to_string(Polarity v);
const char* to_string(KMode v);
const char* to_string(NegationMode v);
NegationMode negation_mode_from_string(const std::string& token);
KMode k_mode_from_string(const std::string& token);

/// One five-option multiple-choice item. The trailing query sentence is kept
/// separate from the vignette body; downstream stages only ever see the body.
struct Question {
    std::string id;
    std::string stem;           // vignette with the query sentence removed
    std::string query_sentence; // the stripped trailing question
    std::array<std::string, kOptionCount> options;
    int gold_index = 0; // 0..4
    StepDomain step_domain = StepDomain::Unknown;

    bool operator==(const Question&) const = default;
};

struct Concept {
    std::string text; // lowercase, <=4 words, comma-free
    Polarity polarity = Polarity::Affirmed;

    bool operator==(const Concept&) const = default;
};

struct ConceptSet {
    std::string question_id;
    std::vector<Concept> concepts;
    KMode k_mode = KMode::FixedFive;

    int k() const { return static_cast<int>(concepts.size()); }
    bool operator==(const ConceptSet&) const = default;
};

struct CorpusMeta {
    std::string corpus_id;
    std::uint64_t total_tokens = 0;
    std::uint64_t total_docs = 0;

    bool operator==(const CorpusMeta&) const = default;
};

struct CountedValue {
    std::uint64_t count = 0;
    bool approx = false;

    bool operator==(const CountedValue&) const = default;
};

/// Retrieved counts for one question: per option, the diagnosis occurrence
/// count and one co-occurrence count per concept. Pair counts are not
/// required to stay below the diagnosis count; occurrence-level backends can
/// legitimately violate that ordering.
struct CountBundle {
    std::string question_id;
    std::array<CountedValue, kOptionCount> diagnosis; // C(d)
    std::array<std::vector<CountedValue>, kOptionCount> pairs; // C(d, x_i)
    CorpusMeta corpus;

    bool operator==(const CountBundle&) const = default;
};

struct RankingResult {
    std::string question_id;
    std::array<double, kOptionCount> scores{};
    int predicted_index = 0;
    std::array<int, kOptionCount> ranks{}; // ranks[i] = rank of option i, 1 = best
    int gold_rank = 0;                     // 0 = undefined
    double softmax_top1 = 0.0;
    NegationMode scoring_mode = NegationMode::IgnoreNegated;
    double delta = 1.0;

    bool operator==(const RankingResult&) const = default;
};

/// Validate one raw dataset record (a JSON object on a single line, fields
/// id/question/options/answer and optional meta.step) into a Question.
/// Splits the trailing query sentence off the question text unless the
/// record already carries stem_stripped/query_sentence.
///
/// Throws Error with MissingField, OptionCountNotFive, GoldIndexOutOfRange,
/// DuplicateOptions, or MalformedResponse (unparseable line).
Question validate_question(const std::string& json_record);

/// Serialize a Question back to the record schema (subset form: includes
/// stem_stripped and query_sentence). validate_question() parses it back to
/// an equal Question.
std::string serialize_question(const Question& q);

std::string serialize_concept_set(const ConceptSet& cs);
ConceptSet parse_concept_set(const std::string& json_record);

std::string serialize_count_bundle(const CountBundle& bundle);
CountBundle parse_count_bundle(const std::string& json_record);

std::string serialize_ranking(const RankingResult& r);
RankingResult parse_ranking(const std::string& json_record);

/// Rank of the gold option under a computed ranking (1..5).
int gold_rank_of(const RankingResult& r, int gold_index);

} // namespace fbpr

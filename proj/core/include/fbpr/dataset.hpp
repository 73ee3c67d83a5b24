#pragma once

#include "fbpr/model.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace fbpr {

/// Result of splitting a question stem at its last sentence boundary.
/// When no boundary exists the whole stem is treated as the final sentence
/// and body stays empty.
struct SentenceSplit {
    std::string body;
    std::string final_sentence;
    bool boundary_found = false;
};

/// Split off the text after the last sentence terminator ('.', '?', '!')
/// that precedes the trailing sentence. A trailing run of terminators
/// belongs to the final sentence, so "... positive. Which ...?" splits at
/// the '.' even though the stem ends in '?'.
SentenceSplit sentence_split_last(const std::string& stem);

/// The two query phrasings that define the diagnosis subset, lowercase.
extern const char* const kDiagnosisPhrasings[2];

/// True when the query sentence, lowercased / trimmed / inner whitespace
/// collapsed, equals one of the two subset phrasings.
bool is_diagnosis_query(const std::string& final_sentence);

struct FilterStats {
    std::size_t input = 0;
    std::size_t kept = 0;
    std::map<std::string, std::size_t> drop_reasons; // reason -> count

    std::size_t dropped() const;
};

/// Keep the questions whose stripped query sentence matches one of the two
/// subset phrasings. Order-preserving; drop reasons account for every
/// record not kept.
std::vector<Question> filter_diagnosis_subset(const std::vector<Question>& records,
                                              FilterStats* stats = nullptr);

/// Lowercase, trim, and collapse internal whitespace runs to single spaces.
std::string normalize_query_text(const std::string& text);

} // namespace fbpr

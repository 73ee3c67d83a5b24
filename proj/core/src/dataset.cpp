#include "fbpr/dataset.hpp"

#include "fbpr/surface_forms.hpp"

#include <cctype>

namespace fbpr {

namespace {

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

SentenceSplit sentence_split_last(const std::string& stem) {
    SentenceSplit out;
    const std::string s = trim(stem);
    if (s.empty()) {
        return out;
    }

    // Skip the trailing terminator run; it closes the final sentence.
    std::size_t end = s.size();
    while (end > 0 && is_terminator(s[end - 1])) --end;

    // The last terminator before that run marks the boundary.
    std::size_t boundary = std::string::npos;
    for (std::size_t i = end; i-- > 0;) {
        if (is_terminator(s[i])) {
            boundary = i;
            break;
        }
    }

    if (boundary == std::string::npos) {
        out.final_sentence = s;
        return out;
    }
    out.boundary_found = true;
    out.body = trim(s.substr(0, boundary + 1));
    out.final_sentence = trim(s.substr(boundary + 1));
    return out;
}

const char* const kDiagnosisPhrasings[2] = {
    "which of the following is the most likely diagnosis?",
    "what is the most likely diagnosis?",
};

std::string normalize_query_text(const std::string& text) {
    std::string collapsed;
    collapsed.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) {
            collapsed.push_back(' ');
            pending_space = false;
        }
        collapsed.push_back(c);
    }
    return ascii_lower(collapsed);
}

bool is_diagnosis_query(const std::string& final_sentence) {
    const std::string norm = normalize_query_text(final_sentence);
    return norm == kDiagnosisPhrasings[0] || norm == kDiagnosisPhrasings[1];
}

std::size_t FilterStats::dropped() const {
    std::size_t n = 0;
    for (const auto& [reason, count] : drop_reasons) n += count;
    return n;
}

std::vector<Question> filter_diagnosis_subset(const std::vector<Question>& records,
                                              FilterStats* stats) {
    std::vector<Question> kept;
    FilterStats local;
    local.input = records.size();
    for (const Question& q : records) {
        if (is_diagnosis_query(q.query_sentence)) {
            kept.push_back(q);
            ++local.kept;
        } else {
            ++local.drop_reasons["query_phrasing_mismatch"];
        }
    }
    if (stats) *stats = local;
    return kept;
}

} // namespace fbpr

#include "fbpr/extraction.hpp"

#include "fbpr/error.hpp"
#include "fbpr/io.hpp"
#include "fbpr/surface_forms.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>

namespace fbpr {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string load_template(const std::filesystem::path& path) {
    std::string text = read_file(path);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream stream(line);
    while (std::getline(stream, item, ',')) {
        items.push_back(trim(item));
    }
    return items;
}

int word_count(const std::string& text) {
    int words = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c));
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

} // namespace

PromptTemplates load_prompt_templates(const std::filesystem::path& dir, KMode k_mode) {
    PromptTemplates t;
    if (k_mode == KMode::FixedFive) {
        t.extract_system = load_template(dir / "extract_system_k5.txt");
        t.extract_user = load_template(dir / "extract_user_k5.txt");
    } else {
        t.extract_system = load_template(dir / "extract_system_unrestricted.txt");
        t.extract_user = load_template(dir / "extract_user_unrestricted.txt");
    }
    t.polarity_system = load_template(dir / "polarity_system.txt");
    t.polarity_user = load_template(dir / "polarity_user.txt");
    return t;
}

std::filesystem::path default_prompt_dir() {
    if (const char* env = std::getenv("FBPR_PROMPT_DIR")) {
        return env;
    }
    return "prompts";
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values) {
    std::string out = tmpl;
    for (const auto& [key, value] : values) {
        const std::string placeholder = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(placeholder, pos)) != std::string::npos) {
            out.replace(pos, placeholder.size(), value);
            pos += value.size();
        }
    }
    return out;
}

RenderedPrompt render_extraction_prompt(const PromptTemplates& templates,
                                        const ExtractionRequest& request) {
    std::map<std::string, std::string> values{{"cleaned_question", request.stem}};
    if (request.k_mode == KMode::FixedFive) {
        values["n"] = "5";
    }
    return RenderedPrompt{templates.extract_system, render_template(templates.extract_user, values)};
}

RenderedPrompt render_polarity_prompt(const PromptTemplates& templates, const std::string& stem,
                                      const std::vector<Concept>& concepts) {
    std::string keywords;
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        if (i > 0) keywords += ", ";
        keywords += concepts[i].text;
    }
    std::map<std::string, std::string> values{{"question_text", stem}, {"keywords", keywords}};
    return RenderedPrompt{templates.polarity_system, render_template(templates.polarity_user, values)};
}

ConceptSet extract_concepts(const ExtractionRequest& request, ChatClient& client,
                            const PromptTemplates& templates) {
    if (request.stem.empty()) {
        throw Error(Errc::EmptyInput, "question '" + request.question_id + "' has an empty stem");
    }
    const RenderedPrompt prompt = render_extraction_prompt(templates, request);
    ChatRequest chat;
    chat.model = request.model_id;
    chat.temperature = 0.0;
    chat.top_logprobs = 0;
    chat.messages = {{"system", prompt.system}, {"user", prompt.user}};
    const std::string response = trim(client.complete(chat));

    if (response.empty()) {
        throw Error(Errc::MalformedResponse,
                    "empty concept response for '" + request.question_id + "'");
    }
    if (response.find('\n') != std::string::npos) {
        throw Error(Errc::MalformedResponse,
                    "concept response for '" + request.question_id + "' spans multiple lines");
    }

    ConceptSet cs;
    cs.question_id = request.question_id;
    cs.k_mode = request.k_mode;
    for (const std::string& item : split_commas(response)) {
        if (item.empty()) {
            throw Error(Errc::MalformedResponse, "concept response for '" + request.question_id +
                                                     "' is not a clean comma-separated list");
        }
        Concept entry;
        entry.text = ascii_lower(item);
        if (word_count(entry.text) > 4) {
            throw Error(Errc::RuleViolation,
                        "concept '" + entry.text + "' exceeds four words");
        }
        cs.concepts.push_back(std::move(entry));
    }
    if (request.k_mode == KMode::FixedFive && cs.k() != 5) {
        throw Error(Errc::CountMismatch, "expected 5 concepts for '" + request.question_id +
                                             "', got " + std::to_string(cs.k()));
    }
    return cs;
}

ConceptSet label_polarity(const std::string& stem, const ConceptSet& concepts, ChatClient& client,
                          const PromptTemplates& templates, const std::string& model_id) {
    const RenderedPrompt prompt = render_polarity_prompt(templates, stem, concepts.concepts);
    ChatRequest chat;
    chat.model = model_id;
    chat.temperature = 0.0;
    chat.top_logprobs = 0;
    chat.messages = {{"system", prompt.system}, {"user", prompt.user}};
    const std::string response = trim(client.complete(chat));

    if (response.find('\n') != std::string::npos) {
        throw Error(Errc::LineFormatViolation,
                    "polarity response for '" + concepts.question_id + "' is not a single line");
    }
    const std::vector<std::string> items = split_commas(response);
    if (items.size() != concepts.concepts.size()) {
        throw Error(Errc::LineFormatViolation,
                    "polarity response carries " + std::to_string(items.size()) + " items for " +
                        std::to_string(concepts.concepts.size()) + " keywords");
    }

    ConceptSet labeled = concepts;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::size_t colon = items[i].rfind(':');
        if (colon == std::string::npos) {
            throw Error(Errc::LineFormatViolation, "polarity item '" + items[i] + "' lacks a colon");
        }
        const std::string keyword = trim(items[i].substr(0, colon));
        const std::string label = trim(items[i].substr(colon + 1));
        if (keyword != concepts.concepts[i].text) {
            throw Error(Errc::OrderMismatch, "expected keyword '" + concepts.concepts[i].text +
                                                 "' at position " + std::to_string(i) + ", got '" +
                                                 keyword + "'");
        }
        if (label == "positive") {
            labeled.concepts[i].polarity = Polarity::Affirmed;
        } else if (label == "negative") {
            labeled.concepts[i].polarity = Polarity::Negated;
        } else {
            throw Error(Errc::UnknownLabel, "polarity label '" + label + "'");
        }
    }
    return labeled;
}

const char* to_string(ExtractTier tier) {
    switch (tier) {
    case ExtractTier::StrictLetter: return "strict_letter";
    case ExtractTier::PhraseFallback: return "phrase_fallback";
    case ExtractTier::Failed: return "failed";
    }
    return "failed";
}

ExtractTier extract_tier_from_string(const std::string& token) {
    if (token == "strict_letter") return ExtractTier::StrictLetter;
    if (token == "phrase_fallback") return ExtractTier::PhraseFallback;
    if (token == "failed") return ExtractTier::Failed;
    throw Error(Errc::ConfigError, "unknown extraction tier '" + token + "'");
}

std::string normalize_phrase(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            pending_space = true;
        }
    }
    return out;
}

LlmPrediction extract_answer(const std::string& raw_response,
                             const std::array<std::string, kOptionCount>& options) {
    LlmPrediction prediction;
    prediction.raw_response = raw_response;

    // Tier 1: stand-alone option letters.
    std::set<char> letters;
    for (std::size_t i = 0; i < raw_response.size(); ++i) {
        const char c = raw_response[i];
        if (c < 'A' || c > 'E') continue;
        const bool left_ok =
            i == 0 || !std::isalnum(static_cast<unsigned char>(raw_response[i - 1]));
        const bool right_ok = i + 1 == raw_response.size() ||
                              !std::isalnum(static_cast<unsigned char>(raw_response[i + 1]));
        if (left_ok && right_ok) letters.insert(c);
    }
    if (letters.size() == 1) {
        prediction.extracted_index = *letters.begin() - 'A';
        prediction.tier = ExtractTier::StrictLetter;
        return prediction;
    }

    // Tier 2: full-phrase check, only once letter detection was ambiguous.
    if (letters.size() > 1) {
        const std::string haystack = " " + normalize_phrase(raw_response) + " ";
        int found = -1;
        int found_count = 0;
        for (int i = 0; i < kOptionCount; ++i) {
            const std::string needle = " " + normalize_phrase(options[i]) + " ";
            if (haystack.find(needle) != std::string::npos) {
                found = i;
                ++found_count;
            }
        }
        if (found_count == 1) {
            prediction.extracted_index = found;
            prediction.tier = ExtractTier::PhraseFallback;
            return prediction;
        }
    }

    prediction.tier = ExtractTier::Failed;
    return prediction;
}

} // namespace fbpr

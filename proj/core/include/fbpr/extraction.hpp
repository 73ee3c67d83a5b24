#pragma once

#include "fbpr/chat_client.hpp"
#include "fbpr/model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace fbpr {

struct ExtractionRequest {
    std::string question_id;
    std::string stem; // query sentence already stripped
    KMode k_mode = KMode::FixedFive;
    std::string model_id;
    // temperature is fixed at 0.0 and top_logprobs at 0
};

/// Prompt templates loaded from versioned files. Placeholders: {n},
/// {cleaned_question} for extraction; {question_text}, {keywords} for
/// polarity labeling.
struct PromptTemplates {
    std::string extract_system;
    std::string extract_user;
    std::string polarity_system;
    std::string polarity_user;
};

PromptTemplates load_prompt_templates(const std::filesystem::path& dir, KMode k_mode);

/// Default template directory: $FBPR_PROMPT_DIR when set, else the installed
/// prompts/ directory next to the binary's share path, else ./prompts.
std::filesystem::path default_prompt_dir();

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values);

struct RenderedPrompt {
    std::string system;
    std::string user;
};

RenderedPrompt render_extraction_prompt(const PromptTemplates& templates,
                                        const ExtractionRequest& request);
RenderedPrompt render_polarity_prompt(const PromptTemplates& templates, const std::string& stem,
                                      const std::vector<Concept>& concepts);

/// Stage-1 concept extraction: one chat call, parsed as a lowercase
/// comma-separated list. FixedFive demands exactly five concepts; each
/// concept must stay within four words.
ConceptSet extract_concepts(const ExtractionRequest& request, ChatClient& client,
                            const PromptTemplates& templates);

/// Polarity labeling: one chat call returning "kw: positive, kw: negative"
/// with keywords echoed in input order. The labeled copy of `concepts` is
/// returned.
ConceptSet label_polarity(const std::string& stem, const ConceptSet& concepts, ChatClient& client,
                          const PromptTemplates& templates, const std::string& model_id);

enum class ExtractTier { StrictLetter, PhraseFallback, Failed };

const char* to_string(ExtractTier tier);
ExtractTier extract_tier_from_string(const std::string& token);

struct LlmPrediction {
    std::string question_id;
    std::string raw_response;
    std::optional<int> extracted_index; // empty iff tier == Failed
    ExtractTier tier = ExtractTier::Failed;
};

/// Three-tier answer extraction from a free-text model response.
///   1. Stand-alone capital letters A-E (bounded by non-alphanumerics,
///      optional ':' or ')'); exactly one distinct letter wins.
///   2. On multiple distinct letters, normalized full-phrase lookup: accept
///      option i only when its phrase occurs and every other option's is
///      absent.
///   3. Otherwise Failed, which downstream scoring marks incorrect.
LlmPrediction extract_answer(const std::string& raw_response,
                             const std::array<std::string, kOptionCount>& options);

/// Lowercase, non-alphanumerics collapsed to single spaces, trimmed.
std::string normalize_phrase(const std::string& text);

} // namespace fbpr

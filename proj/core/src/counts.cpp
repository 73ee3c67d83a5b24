#include "fbpr/counts.hpp"

#include "fbpr/error.hpp"
#include "fbpr/hash.hpp"
#include "fbpr/io.hpp"
#include "fbpr/surface_forms.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iostream>

namespace fbpr {

using nlohmann::json;

std::vector<TokenSpan> whitespace_tokenizer(const std::string& text) {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        std::size_t begin = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        spans.push_back(TokenSpan{begin, i});
    }
    return spans;
}

std::vector<TokenSpan> word_tokenizer(const std::string& text) {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        std::size_t begin = i;
        while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
        spans.push_back(TokenSpan{begin, i});
    }
    return spans;
}

LocalCorpus::LocalCorpus(std::vector<std::string> documents, std::string corpus_id,
                         Tokenizer tokenizer)
    : documents_(std::move(documents)), corpus_id_(std::move(corpus_id)) {
    token_spans_.reserve(documents_.size());
    for (const std::string& doc : documents_) {
        token_spans_.push_back(tokenizer(doc));
        total_tokens_ += token_spans_.back().size();
    }
}

CorpusMeta LocalCorpus::meta() const {
    return CorpusMeta{corpus_id_, total_tokens_, documents_.size()};
}

const std::vector<DocPostings>& LocalCorpus::postings(const std::string& literal) const {
    std::lock_guard<std::mutex> lock(index_mutex_);
    auto it = index_.find(literal);
    if (it != index_.end()) return it->second;

    const bool requires_space = !literal.empty() && literal.front() == ' ';
    const std::string core = requires_space ? literal.substr(1) : literal;

    std::vector<DocPostings> postings;
    if (core.empty()) {
        return index_.emplace(literal, std::move(postings)).first->second;
    }
    for (std::size_t d = 0; d < documents_.size(); ++d) {
        const std::string& text = documents_[d];
        const auto& spans = token_spans_[d];

        // token-begin byte offset -> token index; token-end offsets as a set
        std::unordered_map<std::size_t, std::size_t> begins;
        std::unordered_map<std::size_t, bool> ends;
        begins.reserve(spans.size());
        ends.reserve(spans.size());
        for (std::size_t t = 0; t < spans.size(); ++t) {
            begins.emplace(spans[t].begin, t);
            ends.emplace(spans[t].end, true);
        }

        DocPostings doc_hits;
        doc_hits.doc = d;
        for (std::size_t pos = text.find(core); pos != std::string::npos;
             pos = text.find(core, pos + 1)) {
            auto begin_it = begins.find(pos);
            if (begin_it == begins.end()) continue;
            if (!ends.count(pos + core.size())) continue;
            if (requires_space && (pos == 0 || text[pos - 1] != ' ')) continue;
            doc_hits.positions.push_back(begin_it->second);
        }
        if (!doc_hits.positions.empty()) {
            postings.push_back(std::move(doc_hits));
        }
    }
    return index_.emplace(literal, std::move(postings)).first->second;
}

std::shared_ptr<LocalCorpus> load_corpus_file(const std::filesystem::path& path,
                                              const std::string& corpus_id) {
    const std::vector<std::string> lines = read_lines(path);
    bool structured = false;
    for (const std::string& line : lines) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        structured = !j.is_discarded() && j.is_object() && j.contains("text");
        break;
    }
    std::vector<std::string> docs;
    docs.reserve(lines.size());
    for (const std::string& line : lines) {
        if (line.empty()) continue;
        if (structured) {
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("text") ||
                !j["text"].is_string()) {
                throw Error(Errc::MalformedResponse,
                            "corpus record without a text field in " + path.string());
            }
            docs.push_back(j["text"].get<std::string>());
        } else {
            docs.push_back(line);
        }
    }
    return std::make_shared<LocalCorpus>(std::move(docs), corpus_id);
}

LocalCountBackend::LocalCountBackend(std::shared_ptr<LocalCorpus> corpus, bool enforce_window)
    : corpus_(std::move(corpus)), enforce_window_(enforce_window) {}

namespace {

// Positions (merged over the clause's literals) per document, sorted.
std::unordered_map<std::size_t, std::vector<std::size_t>>
clause_positions(const LocalCorpus& corpus, const std::vector<std::string>& clause) {
    std::unordered_map<std::size_t, std::vector<std::size_t>> by_doc;
    for (const std::string& literal : clause) {
        for (const DocPostings& p : corpus.postings(literal)) {
            auto& dst = by_doc[p.doc];
            dst.insert(dst.end(), p.positions.begin(), p.positions.end());
        }
    }
    for (auto& [doc, positions] : by_doc) {
        std::sort(positions.begin(), positions.end());
    }
    return by_doc;
}

// True when one occurrence can be chosen from every clause with all chosen
// token positions pairwise within `window`.
bool clauses_within_window(const std::vector<const std::vector<std::size_t>*>& lists,
                           std::size_t window) {
    std::vector<std::pair<std::size_t, std::size_t>> merged; // (position, clause)
    for (std::size_t c = 0; c < lists.size(); ++c) {
        for (std::size_t pos : *lists[c]) merged.emplace_back(pos, c);
    }
    std::sort(merged.begin(), merged.end());

    std::vector<std::size_t> in_window(lists.size(), 0);
    std::size_t covered = 0;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < merged.size(); ++hi) {
        if (in_window[merged[hi].second]++ == 0) ++covered;
        while (merged[hi].first - merged[lo].first > window) {
            if (--in_window[merged[lo].second] == 0) --covered;
            ++lo;
        }
        if (covered == lists.size()) return true;
    }
    return false;
}

} // namespace

CountResult LocalCountBackend::count(const CountQuery& query) {
    validate_query(query);

    if (query.cnf.size() == 1) {
        // Occurrence total; OR components are summed without overlap checks.
        std::uint64_t total = 0;
        for (const std::string& literal : query.cnf[0]) {
            for (const DocPostings& p : corpus_->postings(literal)) {
                total += p.positions.size();
            }
        }
        return CountResult{total, false};
    }

    std::vector<std::unordered_map<std::size_t, std::vector<std::size_t>>> per_clause;
    per_clause.reserve(query.cnf.size());
    for (const auto& clause : query.cnf) {
        per_clause.push_back(clause_positions(*corpus_, clause));
    }

    std::uint64_t docs_matched = 0;
    for (std::size_t d = 0; d < corpus_->doc_count(); ++d) {
        std::vector<const std::vector<std::size_t>*> lists;
        lists.reserve(per_clause.size());
        bool all_present = true;
        for (const auto& clause_map : per_clause) {
            auto it = clause_map.find(d);
            if (it == clause_map.end()) {
                all_present = false;
                break;
            }
            lists.push_back(&it->second);
        }
        if (!all_present) continue;
        if (enforce_window_ &&
            !clauses_within_window(lists, static_cast<std::size_t>(query.window_tokens))) {
            continue;
        }
        ++docs_matched;
    }
    return CountResult{docs_matched, false};
}

std::string cache_key(const CountQuery& query, const std::string& corpus_id) {
    return sha256_hex(serialize_query(query) + "\nw" + std::to_string(query.window_tokens) + "\n" +
                      corpus_id);
}

CountCache::CountCache(const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    log_path_ = directory / "counts.cache.jsonl";
    load();
}

void CountCache::load() {
    if (!std::filesystem::exists(log_path_)) return;

    std::ifstream in(log_path_);
    if (!in) {
        std::cerr << "warning: count cache at " << log_path_
                  << " is unreadable; falling back to direct backend calls\n";
        healthy_ = false;
        return;
    }
    std::size_t lines = 0;
    std::size_t skipped = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++lines;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j.contains("count")) {
            ++skipped;
            continue;
        }
        entries_[j["key"].get<std::string>()] =
            CountResult{j["count"].get<std::uint64_t>(), j.value("approx", false)};
    }
    if (skipped > 0) {
        std::cerr << "warning: skipped " << skipped << " corrupt count-cache line(s) in "
                  << log_path_ << "\n";
    }
    // Compact when duplicate appends dominate the log.
    if (lines > 16 && entries_.size() * 2 < lines) {
        std::vector<std::string> keys;
        keys.reserve(entries_.size());
        for (const auto& [key, value] : entries_) keys.push_back(key);
        std::sort(keys.begin(), keys.end());
        std::string compacted;
        for (const std::string& key : keys) {
            const CountResult& r = entries_[key];
            json j{{"key", key}, {"count", r.count}, {"approx", r.approx}, {"fetched_at", 0}};
            compacted += j.dump();
            compacted += "\n";
        }
        write_file_atomic(log_path_, compacted);
    }
}

std::optional<CountResult> CountCache::lookup(const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void CountCache::store(const std::string& key, const CountResult& result) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_[key] = result;
    if (!healthy_) return;
    std::ofstream out(log_path_, std::ios::app);
    if (!out) {
        std::cerr << "warning: count cache at " << log_path_ << " is not writable\n";
        healthy_ = false;
        return;
    }
    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    json j{{"key", key}, {"count", result.count}, {"approx", result.approx}, {"fetched_at", now}};
    out << j.dump() << "\n";
}

std::size_t CountCache::entries() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

CachingBackend::CachingBackend(std::shared_ptr<CountBackend> inner,
                               std::shared_ptr<CountCache> store)
    : inner_(std::move(inner)), store_(std::move(store)) {}

CountResult CachingBackend::count(const CountQuery& query) {
    const std::string key = cache_key(query, inner_->corpus().corpus_id);
    if (auto hit = store_->lookup(key)) {
        return *hit;
    }
    const CountResult result = inner_->count(query);
    store_->store(key, result);
    return result;
}

CountBundle build_count_bundle(const Question& question, const ConceptSet& concepts,
                               CountBackend& backend, PlanOptions options) {
    if (options.corpus_id.empty()) {
        options.corpus_id = backend.corpus().corpus_id;
    }
    const std::uint64_t approx_threshold = backend.capabilities().approx_threshold;

    CountBundle bundle;
    bundle.question_id = question.id;
    bundle.corpus = backend.corpus();

    std::array<VariantSet, kOptionCount> diagnosis_variants;
    for (int d = 0; d < kOptionCount; ++d) {
        diagnosis_variants[d] = expand_variants(question.options[d]);
        const PlanValue v = evaluate_plan(plan_unary_count(diagnosis_variants[d], options), backend);
        bundle.diagnosis[d] = CountedValue{v.count, v.approx || v.clamped};
    }
    for (int d = 0; d < kOptionCount; ++d) {
        const bool frequent_diagnosis = bundle.diagnosis[d].count > approx_threshold;
        for (const Concept& c : concepts.concepts) {
            const VariantSet concept_variants = expand_variants(c.text);
            const PlanValue v =
                evaluate_plan(plan_pair_count(diagnosis_variants[d], concept_variants, options),
                              backend);
            bundle.pairs[d].push_back(
                CountedValue{v.count, v.approx || v.clamped || frequent_diagnosis});
        }
    }
    return bundle;
}

} // namespace fbpr

#pragma once

#include "fbpr/model.hpp"
#include "fbpr/query_plan.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fbpr {

struct CountResult {
    std::uint64_t count = 0;
    bool approx = false;
};

struct BackendCapabilities {
    int max_or_components = kMaxOrComponents;
    int max_window_tokens = kMaxWindowTokens;
    std::uint64_t approx_threshold = 500000; // counts above this are estimates
};

/// A source of CNF count queries against one corpus snapshot. Implementations
/// must tolerate concurrent count() calls and return identical results for
/// identical queries.
class CountBackend {
public:
    virtual ~CountBackend() = default;
    virtual CountResult count(const CountQuery& query) = 0;
    virtual CorpusMeta corpus() const = 0;
    virtual BackendCapabilities capabilities() const { return {}; }
};

struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

using Tokenizer = std::function<std::vector<TokenSpan>(const std::string&)>;

/// Splits on whitespace; tokens are maximal runs of non-space bytes.
std::vector<TokenSpan> whitespace_tokenizer(const std::string& text);

/// Tokens are maximal runs of alphanumeric bytes, so punctuation separates
/// words the way a subword tokenizer would. This is the default.
std::vector<TokenSpan> word_tokenizer(const std::string& text);

/// Occurrence positions of one literal within one document, as indices of
/// the first matched token.
struct DocPostings {
    std::size_t doc = 0;
    std::vector<std::size_t> positions; // strictly increasing
};

/// Desk-scale corpus with a lazily built per-literal postings index.
///
/// A literal matches where its text (leading space included) appears as an
/// exact case-sensitive substring whose core starts and ends on token
/// boundaries. A literal starting with a space therefore only matches after
/// a space byte, mirroring how a token-based service distinguishes the
/// leading-space form.
class LocalCorpus {
public:
    explicit LocalCorpus(std::vector<std::string> documents, std::string corpus_id = "local",
                         Tokenizer tokenizer = word_tokenizer);

    const std::vector<DocPostings>& postings(const std::string& literal) const;
    std::size_t doc_count() const { return documents_.size(); }
    const std::string& document(std::size_t i) const { return documents_[i]; }
    CorpusMeta meta() const;

private:
    std::vector<std::string> documents_;
    std::vector<std::vector<TokenSpan>> token_spans_;
    std::string corpus_id_;
    std::uint64_t total_tokens_ = 0;

    mutable std::mutex index_mutex_;
    mutable std::unordered_map<std::string, std::vector<DocPostings>> index_;
};

/// Load a corpus file: plain text one document per line, or line-delimited
/// JSON records with a "text" field (detected from the first record).
std::shared_ptr<LocalCorpus> load_corpus_file(const std::filesystem::path& path,
                                              const std::string& corpus_id);

/// Exact counts over a LocalCorpus. Single-clause queries return occurrence
/// totals; multi-clause queries return the number of documents matching
/// every clause. Window enforcement is off by default so that document-level
/// inclusion-exclusion stays exact; when on, a document only counts if some
/// choice of per-clause occurrences lies pairwise within the query window.
class LocalCountBackend : public CountBackend {
public:
    explicit LocalCountBackend(std::shared_ptr<LocalCorpus> corpus, bool enforce_window = false);

    CountResult count(const CountQuery& query) override;
    CorpusMeta corpus() const override { return corpus_->meta(); }

private:
    std::shared_ptr<LocalCorpus> corpus_;
    bool enforce_window_;
};

/// Key identifying (query, corpus) in the persistent count cache.
std::string cache_key(const CountQuery& query, const std::string& corpus_id);

/// Append-only persistent store of count results. A store that cannot be
/// read degrades to a miss-everything shell (the caller falls back to the
/// backend); individual unreadable lines are skipped. The log is compacted
/// on open when duplicate keys dominate.
class CountCache {
public:
    explicit CountCache(const std::filesystem::path& directory);

    std::optional<CountResult> lookup(const std::string& key);
    void store(const std::string& key, const CountResult& result);

    bool healthy() const { return healthy_; }
    std::size_t entries() const;
    std::filesystem::path log_path() const { return log_path_; }

private:
    void load();

    std::filesystem::path log_path_;
    bool healthy_ = true;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, CountResult> entries_;
};

/// Write-through caching decorator. Identical queries reach the inner
/// backend at most once per process in the sequential case; concurrent
/// duplicate queries may each reach the backend but always store identical
/// values.
class CachingBackend : public CountBackend {
public:
    CachingBackend(std::shared_ptr<CountBackend> inner, std::shared_ptr<CountCache> store);

    CountResult count(const CountQuery& query) override;
    CorpusMeta corpus() const override { return inner_->corpus(); }
    BackendCapabilities capabilities() const override { return inner_->capabilities(); }

private:
    std::shared_ptr<CountBackend> inner_;
    std::shared_ptr<CountCache> store_;
};

/// Retrieve C(d) and C(d, x_i) for every option/concept of one question.
/// Pair counts are additionally flagged approximate when the option's
/// occurrence count exceeds the backend's approximation threshold, since the
/// service estimates co-occurrences involving such frequent clauses.
CountBundle build_count_bundle(const Question& question, const ConceptSet& concepts,
                               CountBackend& backend, PlanOptions options = {});

} // namespace fbpr

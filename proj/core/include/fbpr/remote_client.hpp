#pragma once

#include "fbpr/counts.hpp"

#include <memory>
#include <string>

namespace fbpr {

struct RemoteBackendConfig {
    std::string url;   // endpoint, e.g. https://counts.example.org/
    std::string index; // served index name; doubles as the corpus id
    int max_inflight = 4;
    double requests_per_second = 10.0;
    int max_retries = 5;
    int retry_base_ms = 200;
    // Published index sizes when known; zero means unknown.
    std::uint64_t total_tokens = 0;
    std::uint64_t total_docs = 0;
};

/// Published sizes of well-known served indices, when we have them.
bool lookup_index_size(const std::string& index, std::uint64_t& tokens, std::uint64_t& docs);

/// HTTP client for an n-gram count service. Sends
///   {"index": ..., "query_type": "count", "query": [[lit, ...], ...]}
/// and reads {"count": ..., "approx": ...}. Rate-limited and bounded in
/// flight; 429s and transient 5xx responses are retried with exponential
/// backoff before surfacing RateLimited / ServiceUnavailable.
class RemoteCountClient : public CountBackend {
public:
    explicit RemoteCountClient(RemoteBackendConfig config);
    ~RemoteCountClient() override;

    RemoteCountClient(const RemoteCountClient&) = delete;
    RemoteCountClient& operator=(const RemoteCountClient&) = delete;

    CountResult count(const CountQuery& query) override;
    CorpusMeta corpus() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace fbpr

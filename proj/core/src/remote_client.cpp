#include "fbpr/remote_client.hpp"

#include "fbpr/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>

namespace fbpr {

using nlohmann::json;

bool lookup_index_size(const std::string& index, std::uint64_t& tokens, std::uint64_t& docs) {
    // Sizes as published for the service's public indices.
    if (index == "v4_dolma-v1_7_llama") {
        tokens = 2604642372173ULL;
        docs = 3403336408ULL;
        return true;
    }
    if (index == "v4_rpj_llama_s4") {
        tokens = 1385942948192ULL;
        docs = 931361530ULL;
        return true;
    }
    return false;
}

namespace {

struct SplitUrl {
    std::string base; // scheme://host[:port]
    std::string path; // remainder, at least "/"
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(Errc::ConfigError, "backend url '" + url + "' lacks a scheme");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return SplitUrl{url, "/"};
    }
    std::string path = url.substr(path_start);
    return SplitUrl{url.substr(0, path_start), path.empty() ? "/" : path};
}

// Evenly spaced request slots; callers block until their slot arrives.
class RateLimiter {
public:
    explicit RateLimiter(double per_second)
        : interval_(per_second > 0 ? std::chrono::duration<double>(1.0 / per_second)
                                   : std::chrono::duration<double>(0)) {}

    void acquire() {
        if (interval_.count() <= 0) return;
        std::chrono::steady_clock::time_point slot;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            const auto now = std::chrono::steady_clock::now();
            next_ = std::max(next_, now);
            slot = next_;
            next_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval_);
        }
        std::this_thread::sleep_until(slot);
    }

private:
    std::chrono::duration<double> interval_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point next_{};
};

class InflightGate {
public:
    explicit InflightGate(int limit) : limit_(limit > 0 ? limit : 1) {}

    void enter() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [this] { return active_ < limit_; });
        ++active_;
    }
    void leave() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            --active_;
        }
        cv_.notify_one();
    }

private:
    int limit_;
    int active_ = 0;
    std::mutex mutex_;
    std::condition_variable cv_;
};

} // namespace

struct RemoteCountClient::Impl {
    RemoteBackendConfig config;
    SplitUrl url;
    httplib::Client http;
    RateLimiter limiter;
    InflightGate gate;

    explicit Impl(RemoteBackendConfig cfg)
        : config(std::move(cfg)),
          url(split_url(config.url)),
          http(url.base),
          limiter(config.requests_per_second),
          gate(config.max_inflight) {
        http.set_connection_timeout(10);
        http.set_read_timeout(60);
        if (config.total_tokens == 0) {
            lookup_index_size(config.index, config.total_tokens, config.total_docs);
        }
    }
};

RemoteCountClient::RemoteCountClient(RemoteBackendConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {
    if (impl_->config.index.empty()) {
        throw Error(Errc::ConfigError, "remote count backend needs an index name");
    }
}

RemoteCountClient::~RemoteCountClient() = default;

CorpusMeta RemoteCountClient::corpus() const {
    return CorpusMeta{impl_->config.index, impl_->config.total_tokens, impl_->config.total_docs};
}

CountResult RemoteCountClient::count(const CountQuery& query) {
    validate_query(query);

    json body;
    body["index"] = impl_->config.index;
    body["query_type"] = "count";
    body["query"] = query.cnf;
    const std::string payload = body.dump();

    impl_->gate.enter();
    struct GateGuard {
        InflightGate& gate;
        ~GateGuard() { gate.leave(); }
    } guard{impl_->gate};

    std::string last_failure = "no attempt made";
    for (int attempt = 0; attempt <= impl_->config.max_retries; ++attempt) {
        if (attempt > 0) {
            const int backoff = impl_->config.retry_base_ms * (1 << std::min(attempt - 1, 5));
            std::this_thread::sleep_for(std::chrono::milliseconds(std::min(backoff, 5000)));
        }
        impl_->limiter.acquire();

        httplib::Result res = impl_->http.Post(impl_->url.path, payload, "application/json");
        if (!res) {
            last_failure = "transport error " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429) {
            last_failure = "rate limited (429)";
            continue;
        }
        if (res->status >= 500) {
            last_failure = "server error (" + std::to_string(res->status) + ")";
            continue;
        }
        if (res->status != 200) {
            throw Error(Errc::ServiceUnavailable,
                        "count service replied " + std::to_string(res->status));
        }

        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.is_object() || !reply.contains("count") ||
            !reply["count"].is_number()) {
            throw Error(Errc::MalformedResponse, "count service reply is not {count, approx}");
        }
        if (reply["count"].is_number_integer() && reply["count"].get<long long>() < 0) {
            throw Error(Errc::MalformedResponse, "count service reported a negative count");
        }
        return CountResult{reply["count"].get<std::uint64_t>(), reply.value("approx", false)};
    }
    if (last_failure.find("rate limited") != std::string::npos) {
        throw Error(Errc::RateLimited, "gave up after " +
                                           std::to_string(impl_->config.max_retries + 1) +
                                           " attempts: " + last_failure);
    }
    throw Error(Errc::ServiceUnavailable,
                "gave up after " + std::to_string(impl_->config.max_retries + 1) +
                    " attempts: " + last_failure);
}

} // namespace fbpr

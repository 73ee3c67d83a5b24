#include "fbpr/chat_client.hpp"

#include "fbpr/error.hpp"
#include "fbpr/hash.hpp"
#include "fbpr/io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <unordered_map>

namespace fbpr {

using nlohmann::json;

std::string chat_request_json(const ChatRequest& request) {
    json messages = json::array();
    for (const ChatMessage& m : request.messages) {
        messages.push_back(json{{"role", m.role}, {"content", m.content}});
    }
    json j;
    j["model"] = request.model;
    j["temperature"] = request.temperature;
    j["top_logprobs"] = request.top_logprobs;
    j["messages"] = messages;
    return j.dump();
}

std::string chat_request_hash(const ChatRequest& request) {
    return sha256_hex(chat_request_json(request));
}

namespace {

struct SplitUrl {
    std::string base;
    std::string path;
};

SplitUrl split_chat_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(Errc::ConfigError, "chat url '" + url + "' lacks a scheme");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return SplitUrl{url, "/"};
    return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

struct HttpChatClient::Impl {
    ChatClientConfig config;
    SplitUrl url;
    httplib::Client http;
    std::string api_key;

    explicit Impl(ChatClientConfig cfg)
        : config(std::move(cfg)), url(split_chat_url(config.url)), http(url.base) {
        http.set_connection_timeout(10);
        http.set_read_timeout(120);
        const char* key = std::getenv(config.api_key_env.c_str());
        if (!key) key = std::getenv("OPENAI_API_KEY");
        if (!key) {
            throw Error(Errc::ConfigError,
                        "no chat API key in $" + config.api_key_env + " or $OPENAI_API_KEY");
        }
        api_key = key;
    }
};

HttpChatClient::HttpChatClient(ChatClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(const ChatRequest& request) {
    const std::string payload = chat_request_json(request);
    httplib::Headers headers{{"Authorization", "Bearer " + impl_->api_key}};

    std::string last_failure = "no attempt made";
    for (int attempt = 0; attempt <= impl_->config.max_retries; ++attempt) {
        if (attempt > 0) {
            const int backoff = impl_->config.retry_base_ms * (1 << std::min(attempt - 1, 5));
            std::this_thread::sleep_for(std::chrono::milliseconds(std::min(backoff, 10000)));
        }
        httplib::Result res = impl_->http.Post(impl_->url.path, headers, payload, "application/json");
        if (!res) {
            last_failure = "transport error " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_failure = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw Error(Errc::ClientError, "chat service replied " + std::to_string(res->status) +
                                               ": " + res->body);
        }
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty()) {
            throw Error(Errc::MalformedResponse, "chat reply carries no choices");
        }
        const json& message = reply["choices"][0].value("message", json::object());
        if (!message.contains("content") || !message["content"].is_string()) {
            throw Error(Errc::MalformedResponse, "chat reply carries no message content");
        }
        return message["content"].get<std::string>();
    }
    throw Error(Errc::ClientError, "chat request gave up after " +
                                       std::to_string(impl_->config.max_retries + 1) +
                                       " attempts: " + last_failure);
}

ReplayChatClient::ReplayChatClient(const std::filesystem::path& fixtures) : path_(fixtures) {
    for (const std::string& line : read_lines(fixtures)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("request_hash") ||
            !j.contains("response_text")) {
            throw Error(Errc::StoreCorrupt, "bad replay fixture line in " + fixtures.string());
        }
        responses_[j["request_hash"].get<std::string>()] =
            j["response_text"].get<std::string>();
    }
}

std::string ReplayChatClient::complete(const ChatRequest& request) {
    const std::string hash = chat_request_hash(request);
    auto it = responses_.find(hash);
    if (it == responses_.end()) {
        throw Error(Errc::ClientError,
                    "no recorded response for request " + hash + " in " + path_.string());
    }
    return it->second;
}

std::string replay_fixture_line(const std::string& request_hash,
                                const std::string& response_text) {
    return json{{"request_hash", request_hash}, {"response_text", response_text}}.dump();
}

RecordingChatClient::RecordingChatClient(std::shared_ptr<ChatClient> inner,
                                         std::filesystem::path fixtures_out)
    : inner_(std::move(inner)), out_(std::move(fixtures_out)) {}

std::string RecordingChatClient::complete(const ChatRequest& request) {
    const std::string response = inner_->complete(request);
    std::ofstream out(out_, std::ios::app);
    if (!out) {
        throw Error(Errc::IoError, "cannot append replay fixture to " + out_.string());
    }
    out << replay_fixture_line(chat_request_hash(request), response) << "\n";
    return response;
}

} // namespace fbpr

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace fbpr {

struct ChatMessage {
    std::string role; // "system" or "user"
    std::string content;
};

struct ChatRequest {
    std::string model;
    double temperature = 0.0;
    int top_logprobs = 0;
    std::vector<ChatMessage> messages;
};

/// Canonical JSON body of a request; also the record/replay identity.
std::string chat_request_json(const ChatRequest& request);
std::string chat_request_hash(const ChatRequest& request);

class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

struct ChatClientConfig {
    std::string url = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "FBPR_CHAT_API_KEY"; // falls back to OPENAI_API_KEY
    int max_retries = 5;
    int retry_base_ms = 500;
};

/// OpenAI-compatible chat-completions client. The API key is read from the
/// environment, never from configuration files.
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(ChatClientConfig config);
    ~HttpChatClient() override;

    std::string complete(const ChatRequest& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Replays recorded responses keyed by request hash; a miss is a ClientError.
/// Fixture lines are {"request_hash": ..., "response_text": ...}.
class ReplayChatClient : public ChatClient {
public:
    explicit ReplayChatClient(const std::filesystem::path& fixtures);

    std::string complete(const ChatRequest& request) override;
    std::size_t size() const { return responses_.size(); }

private:
    std::filesystem::path path_;
    std::unordered_map<std::string, std::string> responses_;
};

/// Pass-through decorator that appends each (request hash, response) pair to
/// a fixture file, producing replay inputs from a live run.
class RecordingChatClient : public ChatClient {
public:
    RecordingChatClient(std::shared_ptr<ChatClient> inner, std::filesystem::path fixtures_out);

    std::string complete(const ChatRequest& request) override;

private:
    std::shared_ptr<ChatClient> inner_;
    std::filesystem::path out_;
};

/// One fixture line in the replay format.
std::string replay_fixture_line(const std::string& request_hash, const std::string& response_text);

} // namespace fbpr

#pragma once

#include "fbpr/chat_client.hpp"
#include "fbpr/error.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace fbpr::testing {

/// In-memory chat stand-in: responses either keyed by exact request hash or
/// served FIFO. Every request seen is kept for assertions.
class ScriptedChatClient : public ChatClient {
public:
    void script(const ChatRequest& request, std::string response) {
        by_hash_[chat_request_hash(request)] = std::move(response);
    }

    void push(std::string response) { queue_.push_back(std::move(response)); }

    std::string complete(const ChatRequest& request) override {
        seen.push_back(request);
        auto it = by_hash_.find(chat_request_hash(request));
        if (it != by_hash_.end()) return it->second;
        if (next_ < queue_.size()) return queue_[next_++];
        throw Error(Errc::ClientError, "unscripted chat request");
    }

    std::vector<ChatRequest> seen;

private:
    std::unordered_map<std::string, std::string> by_hash_;
    std::vector<std::string> queue_;
    std::size_t next_ = 0;
};

} // namespace fbpr::testing

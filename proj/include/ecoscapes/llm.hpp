#pragma once

#include "ecoscapes/http.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ecoscapes::llm {

enum class Role { System, User, Assistant };

std::string_view role_name(Role role);

struct Attachment {
    std::string mime = "image/png";
    std::vector<std::uint8_t> bytes;
};

struct ChatMessage {
    Role role = Role::User;
    std::string text;
    std::vector<Attachment> images;  // never set on System messages
};

struct DecodingParams {
    double temperature = 0.0;
    std::optional<int> max_tokens;
};

// One complete exchange as sent to a backend: the optional system message
// first, then the history, then the new user message.
struct ChatRequest {
    std::uint64_t session_id = 0;
    std::string model;
    std::vector<ChatMessage> messages;
    DecodingParams params;
};

// Shareable across threads and sessions.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual bool configured() const { return true; }

    std::uint64_t next_session_id() { return ++session_counter_; }

private:
    std::atomic<std::uint64_t> session_counter_{0};
};

// Strictly sequential: one send in flight per session.
class ChatSession {
public:
    ChatSession(std::shared_ptr<ChatBackend> backend, std::optional<std::string> system,
                std::string model, DecodingParams params, std::uint64_t id);

    /// Sends one user turn and returns the assistant reply. History grows by
    /// two messages on success and is left untouched on failure.
    std::string send(std::string_view user_text, std::vector<Attachment> images = {});

    const std::optional<std::string>& system() const { return system_; }
    const std::vector<ChatMessage>& history() const { return history_; }
    const std::string& model() const { return model_; }
    std::uint64_t id() const { return id_; }

private:
    std::shared_ptr<ChatBackend> backend_;
    std::optional<std::string> system_;
    std::string model_;
    DecodingParams params_;
    std::uint64_t id_;
    std::vector<ChatMessage> history_;
};

/// Throws BackendUnconfigured for a null or unconfigured backend.
ChatSession open_session(std::shared_ptr<ChatBackend> backend, std::optional<std::string> system,
                         std::string model, DecodingParams params = {});

/// Deterministic reply: "STUB[<16 hex digest of every input>]: <first 40
/// characters of text>". With a non-empty history, every user turn
/// (earlier ones, then `text`) follows in full, separated by blank lines.
std::string stub_reply(const std::optional<std::string>& system,
                       std::span<const ChatMessage> history, std::string_view text,
                       std::span<const Attachment> images);

// Offline backend answering with stub_reply.
class StubBackend final : public ChatBackend {
public:
    std::string complete(const ChatRequest& request) override;
};

// Chat-completions style HTTP backend. Images travel base64-inline as
// data URLs.
class RemoteChatBackend final : public ChatBackend {
public:
    struct Options {
        std::string url;
        std::optional<std::string> token;
        int max_retries = 3;  // only for HTTP 429
        std::chrono::milliseconds base_backoff{500};
        std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
    };

    RemoteChatBackend(std::shared_ptr<http::Transport> transport, Options options);

    std::string complete(const ChatRequest& request) override;
    bool configured() const override { return transport_ != nullptr && !options_.url.empty(); }

private:
    std::shared_ptr<http::Transport> transport_;
    Options options_;
};

std::string build_request_body(const ChatRequest& request);
/// choices[0].message.content; throws MalformedReply.
std::string parse_reply_body(std::string_view body);

// First `n` UTF-8 code points of `text`.
std::string utf8_prefix(std::string_view text, std::size_t n);

}  // namespace ecoscapes::llm

#include "ecoscapes/llm.hpp"

#include "ecoscapes/digest.hpp"
#include "ecoscapes/error.hpp"

#include <json.hpp>

#include <thread>

namespace ecoscapes::llm {

using nlohmann::json;

std::string_view role_name(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

ChatSession::ChatSession(std::shared_ptr<ChatBackend> backend, std::optional<std::string> system,
                         std::string model, DecodingParams params, std::uint64_t id)
    : backend_(std::move(backend)),
      system_(std::move(system)),
      model_(std::move(model)),
      params_(params),
      id_(id) {}

std::string ChatSession::send(std::string_view user_text, std::vector<Attachment> images) {
    ChatRequest req;
    req.session_id = id_;
    req.model = model_;
    req.params = params_;
    req.messages.reserve(history_.size() + 2);
    if (system_) {
        req.messages.push_back({Role::System, *system_, {}});
    }
    req.messages.insert(req.messages.end(), history_.begin(), history_.end());
    ChatMessage user{Role::User, std::string(user_text), std::move(images)};
    req.messages.push_back(user);

    std::string reply = backend_->complete(req);

    history_.push_back(std::move(user));
    history_.push_back({Role::Assistant, reply, {}});
    return reply;
}

ChatSession open_session(std::shared_ptr<ChatBackend> backend, std::optional<std::string> system,
                         std::string model, DecodingParams params) {
    if (!backend || !backend->configured()) {
        throw Error(Errc::BackendUnconfigured, "chat backend is not configured");
    }
    const auto id = backend->next_session_id();
    return ChatSession(std::move(backend), std::move(system), std::move(model), params, id);
}

std::string utf8_prefix(std::string_view text, std::size_t n) {
    std::size_t pos = 0;
    std::size_t count = 0;
    while (pos < text.size() && count < n) {
        const auto lead = static_cast<unsigned char>(text[pos]);
        std::size_t len = 1;
        if (lead >= 0xF0) len = 4;
        else if (lead >= 0xE0) len = 3;
        else if (lead >= 0xC0) len = 2;
        pos = std::min(text.size(), pos + len);
        ++count;
    }
    return std::string(text.substr(0, pos));
}

std::string stub_reply(const std::optional<std::string>& system,
                       std::span<const ChatMessage> history, std::string_view text,
                       std::span<const Attachment> images) {
    Sha256Stream digest;
    digest.field(system ? "S1" : "S0").field(system.value_or(""));
    digest.field(std::to_string(history.size()));
    for (const auto& m : history) {
        digest.field(role_name(m.role)).field(m.text).field(std::to_string(m.images.size()));
        for (const auto& img : m.images) digest.field(img.mime).field(img.bytes);
    }
    digest.field(text).field(std::to_string(images.size()));
    for (const auto& img : images) digest.field(img.mime).field(img.bytes);
    std::string reply = "STUB[" + digest.hex().substr(0, 16) + "]: " + utf8_prefix(text, 40);
    if (history.empty()) return reply;
    // Multi-turn: echo every user turn so later stages can see what reached the model.
    for (const auto& m : history) {
        if (m.role == Role::User) reply += "\n\n" + m.text;
    }
    reply += "\n\n";
    reply += text;
    return reply;
}

std::string StubBackend::complete(const ChatRequest& request) {
    std::span<const ChatMessage> msgs(request.messages);
    std::optional<std::string> system;
    if (!msgs.empty() && msgs.front().role == Role::System) {
        system = msgs.front().text;
        msgs = msgs.subspan(1);
    }
    if (msgs.empty() || msgs.back().role != Role::User) {
        throw Error(Errc::InvalidArgument, "request must end with a user message");
    }
    const auto& last = msgs.back();
    return stub_reply(system, msgs.first(msgs.size() - 1), last.text, last.images);
}

RemoteChatBackend::RemoteChatBackend(std::shared_ptr<http::Transport> transport, Options options)
    : transport_(std::move(transport)), options_(std::move(options)) {
    if (!options_.sleep) {
        options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
}

std::string build_request_body(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& m : request.messages) {
        json msg;
        msg["role"] = role_name(m.role);
        if (m.images.empty()) {
            msg["content"] = m.text;
        } else {
            json parts = json::array();
            parts.push_back({{"type", "text"}, {"text", m.text}});
            for (const auto& img : m.images) {
                parts.push_back({{"type", "image_url"},
                                 {"image_url",
                                  {{"url", "data:" + img.mime + ";base64," + base64_encode(img.bytes)}}}});
            }
            msg["content"] = parts;
        }
        messages.push_back(std::move(msg));
    }
    json body = {{"model", request.model},
                 {"messages", messages},
                 {"temperature", request.params.temperature},
                 {"stream", false}};
    if (request.params.max_tokens) body["max_tokens"] = *request.params.max_tokens;
    return body.dump();
}

std::string parse_reply_body(std::string_view body) {
    const json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(Errc::MalformedReply, "reply is not a JSON object");
    }
    const auto choices = doc.find("choices");
    if (choices == doc.end() || !choices->is_array() || choices->empty()) {
        throw Error(Errc::MalformedReply, "reply has no choices");
    }
    const auto& first = choices->front();
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
        !first["message"].contains("content") || !first["message"]["content"].is_string()) {
        throw Error(Errc::MalformedReply, "reply has no message content");
    }
    return first["message"]["content"].get<std::string>();
}

std::string RemoteChatBackend::complete(const ChatRequest& request) {
    if (!configured()) {
        throw Error(Errc::BackendUnconfigured, "remote chat backend has no endpoint");
    }
    http::Request req;
    req.method = "POST";
    req.url = options_.url;
    req.body = build_request_body(request);
    req.content_type = "application/json";
    if (options_.token && !options_.token->empty()) {
        req.headers.emplace("Authorization", "Bearer " + *options_.token);
    }

    const int attempts_allowed = options_.max_retries + 1;
    for (int attempt = 1;; ++attempt) {
        http::Response resp;
        try {
            resp = transport_->send(req);
        } catch (const Error& e) {
            throw Error(Errc::Transport, e.message());
        }
        if (resp.status == 429) {
            if (attempt >= attempts_allowed) {
                throw Error(Errc::RateLimited,
                            "still rate limited after " + std::to_string(attempt) + " attempts");
            }
            options_.sleep(options_.base_backoff * (1 << (attempt - 1)));
            continue;
        }
        if (resp.status < 200 || resp.status >= 300) {
            throw Error(Errc::Transport, "chat endpoint answered HTTP " + std::to_string(resp.status));
        }
        return parse_reply_body(resp.body);
    }
}

}  // namespace ecoscapes::llm

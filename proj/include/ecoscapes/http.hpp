#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace ecoscapes::http {

using Headers = std::multimap<std::string, std::string>;

struct Request {
    std::string method;  // "GET" or "POST"
    std::string url;     // absolute: scheme://host[:port]/path[?query]
    Headers headers;
    std::string body;
    std::string content_type;
};

struct Response {
    int status = 0;
    std::string body;
    Headers headers;
};

// Outbound HTTP. Implementations must be safe to call concurrently.
// Transport failures (DNS, connect, TLS, timeout) throw Error{Errc::Transport};
// any HTTP status is returned as a Response.
class Transport {
public:
    virtual ~Transport() = default;
    virtual Response send(const Request& request) = 0;
};

// cpp-httplib backed transport. A fresh client is created per request.
class HttplibTransport final : public Transport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(60));
    Response send(const Request& request) override;

private:
    std::chrono::seconds timeout_;
};

// Wraps another transport and keeps a log of every request. Used to assert
// on network activity (and its absence).
class RecordingTransport final : public Transport {
public:
    explicit RecordingTransport(std::shared_ptr<Transport> inner = nullptr);
    Response send(const Request& request) override;

    std::size_t call_count() const;
    std::vector<Request> requests() const;

private:
    std::shared_ptr<Transport> inner_;
    mutable std::mutex mutex_;
    std::vector<Request> log_;
};

std::string url_encode(std::string_view text);

struct UrlParts {
    std::string scheme_host_port;  // "https://example.org:8443"
    std::string path_and_query;    // "/search?q=x"
};
UrlParts split_url(const std::string& url);

}  // namespace ecoscapes::http

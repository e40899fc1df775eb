#include "ecoscapes/http.hpp"

#include "ecoscapes/error.hpp"

#include <httplib.h>

namespace ecoscapes::http {

UrlParts split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(Errc::InvalidArgument, "URL has no scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string url_encode(std::string_view text) {
    static constexpr char kDigits[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) != 0 || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kDigits[c >> 4]);
            out.push_back(kDigits[c & 0x0f]);
        }
    }
    return out;
}

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

Response HttplibTransport::send(const Request& request) {
    const auto parts = split_url(request.url);
    httplib::Client client(parts.scheme_host_port);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    client.set_follow_location(true);

    httplib::Headers headers(request.headers.begin(), request.headers.end());
    httplib::Result result;
    if (request.method == "GET") {
        result = client.Get(parts.path_and_query, headers);
    } else if (request.method == "POST") {
        result = client.Post(parts.path_and_query, headers, request.body,
                             request.content_type.empty() ? "application/json"
                                                          : request.content_type);
    } else {
        throw Error(Errc::InvalidArgument, "unsupported HTTP method " + request.method);
    }
    if (!result) {
        throw Error(Errc::Transport, request.method + " " + request.url + " failed: " +
                                         httplib::to_string(result.error()));
    }
    Response response;
    response.status = result->status;
    response.body = result->body;
    response.headers.insert(result->headers.begin(), result->headers.end());
    return response;
}

RecordingTransport::RecordingTransport(std::shared_ptr<Transport> inner)
    : inner_(std::move(inner)) {}

Response RecordingTransport::send(const Request& request) {
    {
        std::lock_guard lock(mutex_);
        log_.push_back(request);
    }
    if (!inner_) {
        throw Error(Errc::Transport, "no network in this context: " + request.url);
    }
    return inner_->send(request);
}

std::size_t RecordingTransport::call_count() const {
    std::lock_guard lock(mutex_);
    return log_.size();
}

std::vector<Request> RecordingTransport::requests() const {
    std::lock_guard lock(mutex_);
    return log_;
}

}  // namespace ecoscapes::http

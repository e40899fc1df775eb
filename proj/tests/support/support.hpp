#pragma once

#include "ecoscapes/error.hpp"
#include "ecoscapes/http.hpp"
#include "ecoscapes/image.hpp"
#include "ecoscapes/llm.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

inline std::filesystem::path fixtures_dir() { return ECOSCAPES_FIXTURES_DIR; }
inline std::filesystem::path data_dir() { return ECOSCAPES_DATA_DIR; }
inline std::filesystem::path corpus_dir() { return data_dir() / "prompts"; }
inline std::filesystem::path manual_root() { return fixtures_dir() / "satellite_data"; }
inline const std::string kFixtureLocation = "Roßtal";

inline std::string read_text(const std::filesystem::path& path) {
    const auto bytes = ecoscapes::read_file_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "ecoscapes") {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Routes requests by URL path to canned handlers; unrouted paths get 404.
class FakeTransport final : public ecoscapes::http::Transport {
public:
    using Handler = std::function<ecoscapes::http::Response(const ecoscapes::http::Request&)>;

    void route(const std::string& path, Handler h) {
        std::lock_guard lock(mutex_);
        routes_[path] = std::move(h);
    }
    void reply(const std::string& path, int status, std::string body) {
        route(path, [status, body](const ecoscapes::http::Request&) {
            return ecoscapes::http::Response{status, body, {}};
        });
    }

    ecoscapes::http::Response send(const ecoscapes::http::Request& request) override {
        auto path = ecoscapes::http::split_url(request.url).path_and_query;
        path = path.substr(0, path.find('?'));
        Handler h;
        {
            std::lock_guard lock(mutex_);
            log_.push_back(request);
            auto it = routes_.find(path);
            if (it == routes_.end()) return {404, "not found", {}};
            h = it->second;
        }
        return h(request);
    }

    std::vector<ecoscapes::http::Request> requests() const {
        std::lock_guard lock(mutex_);
        return log_;
    }

private:
    mutable std::mutex mutex_;
    std::map<std::string, Handler> routes_;
    std::vector<ecoscapes::http::Request> log_;
};

// Stub backend that records every request and can be told to fail.
class ScriptedBackend final : public ecoscapes::llm::ChatBackend {
public:
    std::function<bool(const ecoscapes::llm::ChatRequest&)> fail_when;

    std::string complete(const ecoscapes::llm::ChatRequest& request) override {
        {
            std::lock_guard lock(mutex_);
            requests_.push_back(request);
        }
        if (fail_when && fail_when(request)) {
            throw ecoscapes::Error(ecoscapes::Errc::Transport, "injected failure");
        }
        return stub_.complete(request);
    }

    std::vector<ecoscapes::llm::ChatRequest> requests() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }

private:
    ecoscapes::llm::StubBackend stub_;
    mutable std::mutex mutex_;
    std::vector<ecoscapes::llm::ChatRequest> requests_;
};

inline bool has_system(const ecoscapes::llm::ChatRequest& r, const std::string& text) {
    return !r.messages.empty() && r.messages.front().role == ecoscapes::llm::Role::System &&
           r.messages.front().text == text;
}

}  // namespace testsupport

#include <httplib.h>

#include <chrono>
#include <future>

#include "vecdraw/error.hpp"
#include "vecdraw/net.hpp"

namespace vecdraw {

void BackendConfig::validate() const {
    if (!(timeout_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "backend timeout must be positive");
    if (max_retries < 0) throw Error(ErrorCode::InvalidArgument, "backend retries must be non-negative");
}

InFlightLimiter::InFlightLimiter(std::size_t limit) : limit_(limit == 0 ? 1 : limit) {}

InFlightLimiter::Permit::~Permit() {
    if (owner_) owner_->release();
}

InFlightLimiter::Permit InFlightLimiter::acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return active_ < limit_; });
    ++active_;
    peak_ = std::max(peak_, active_);
    return Permit(*this);
}

void InFlightLimiter::release() {
    {
        std::lock_guard lock(mu_);
        --active_;
    }
    cv_.notify_one();
}

void InFlightLimiter::set_limit(std::size_t limit) {
    {
        std::lock_guard lock(mu_);
        limit_ = limit == 0 ? 1 : limit;
    }
    cv_.notify_all();
}

std::size_t InFlightLimiter::limit() const {
    std::lock_guard lock(mu_);
    return limit_;
}

std::size_t InFlightLimiter::in_flight() const {
    std::lock_guard lock(mu_);
    return active_;
}

std::size_t InFlightLimiter::peak() const {
    std::lock_guard lock(mu_);
    return peak_;
}

InFlightLimiter& global_limiter() {
    static InFlightLimiter limiter(kDefaultInFlight);
    return limiter;
}

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url, const std::string& port) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.compare(0, scheme_end, "http") != 0) {
        throw Error(ErrorCode::ProviderUnavailable, port + ": endpoint must be an http:// URL, got '" + url + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

}  // namespace

nlohmann::json post_json(const BackendConfig& cfg, const std::string& route, const nlohmann::json& body,
                         const std::string& port) {
    cfg.validate();
    const Url url = split_url(cfg.endpoint, port);
    std::string path = url.path + route;
    if (path.empty()) path = "/";
    const std::string payload = body.dump();
    const auto timeout = std::chrono::duration<double>(cfg.timeout_s);
    const auto whole = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - whole);

    Error last(ErrorCode::ProviderUnavailable, port + ": no attempt made");
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        auto permit = global_limiter().acquire();
        httplib::Client client(url.origin);
        client.set_connection_timeout(whole.count(), micros.count());
        client.set_read_timeout(whole.count(), micros.count());
        client.set_write_timeout(whole.count(), micros.count());
        httplib::Headers headers;
        if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

        // The socket timeouts apply per read; the future bounds the whole attempt.
        auto pending = std::async(std::launch::async,
                                  [&] { return client.Post(path, headers, payload, "application/json"); });
        if (pending.wait_for(timeout) == std::future_status::timeout) {
            client.stop();
            pending.wait();
            last = Error(ErrorCode::ProviderTimeout, port + ": no reply within " + std::to_string(cfg.timeout_s) + " s");
            continue;
        }
        auto res = pending.get();
        if (!res) {
            const auto err = res.error();
            const bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
            last = Error(timed_out ? ErrorCode::ProviderTimeout : ErrorCode::ProviderUnavailable,
                         port + ": " + httplib::to_string(err) + " (" + cfg.endpoint + ")");
            continue;
        }
        if (res->status >= 500 || res->status == 429) {
            last = Error(ErrorCode::ProviderUnavailable, port + ": HTTP " + std::to_string(res->status));
            continue;
        }
        if (res->status != 200) {
            throw Error(ErrorCode::ProviderUnavailable, port + ": HTTP " + std::to_string(res->status));
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ProviderMalformedResponse, port + ": reply is not JSON: " + e.what());
        }
    }
    throw last;
}

}  // namespace vecdraw

#pragma once

// Shared plumbing for the JSON-over-HTTP provider ports.

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <string>

#include <json.hpp>

namespace vecdraw {

struct BackendConfig {
    std::string endpoint = "mock";  // base URL, or "mock"
    double timeout_s = 30.0;
    int max_retries = 2;
    std::uint64_t seed = 0;
    std::string api_key;

    bool is_mock() const { return endpoint == "mock"; }
    /// Throws InvalidArgument when timeout <= 0 or retries < 0.
    void validate() const;
};

/// Bounds concurrent provider requests process-wide.
class InFlightLimiter {
public:
    explicit InFlightLimiter(std::size_t limit);

    class Permit {
    public:
        explicit Permit(InFlightLimiter& owner) : owner_(&owner) {}
        Permit(Permit&& other) noexcept : owner_(other.owner_) { other.owner_ = nullptr; }
        Permit(const Permit&) = delete;
        Permit& operator=(const Permit&) = delete;
        Permit& operator=(Permit&&) = delete;
        ~Permit();

    private:
        InFlightLimiter* owner_;
    };

    Permit acquire();
    void set_limit(std::size_t limit);
    std::size_t limit() const;
    std::size_t in_flight() const;
    std::size_t peak() const;

private:
    void release();

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::size_t limit_;
    std::size_t active_ = 0;
    std::size_t peak_ = 0;
};

inline constexpr std::size_t kDefaultInFlight = 8;

InFlightLimiter& global_limiter();

/// POSTs `body` to endpoint + route and returns the parsed JSON reply.
/// Each attempt is bounded by cfg.timeout_s; connection failures, timeouts and
/// 5xx/429 replies are retried up to cfg.max_retries times. Other non-200
/// replies raise ProviderUnavailable at once; unparsable bodies raise
/// ProviderMalformedResponse. `port` names the caller in messages.
nlohmann::json post_json(const BackendConfig& cfg, const std::string& route, const nlohmann::json& body,
                         const std::string& port);

}  // namespace vecdraw

#pragma once

#include "orderbench/channel.hpp"
#include "orderbench/codec.hpp"
#include "orderbench/orderers.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace orderbench {

inline constexpr std::chrono::milliseconds kDefaultEndpointTimeout{30000};

/// ORDER_BENCH_TIMEOUT_SECS when set to a positive number, otherwise fallback.
std::chrono::milliseconds timeout_from_env(std::chrono::milliseconds fallback = kDefaultEndpointTimeout);

struct ExternalConfig {
    std::string uri;
    MarkerMode mode = MarkerMode::sequential();
    std::chrono::milliseconds timeout = kDefaultEndpointTimeout; ///< per reply
    std::size_t pipeline_depth = 16;
    /// Replaces open_channel(uri) when set.
    std::function<std::unique_ptr<LineChannel>()> connect;
};

/// Orderer backed by a process or socket speaking the order-bench/1 protocol.
///
/// Each concurrent caller gets its own connection; idle connections are
/// pooled. A connection that times out or violates the protocol is dropped
/// and its in-flight instances fail.
class ExternalOrderer final : public Orderer {
public:
    explicit ExternalOrderer(ExternalConfig config);
    ~ExternalOrderer() override;

    std::string name() const override { return "external:" + config_.uri; }
    Prediction order(const ShuffledInstance& instance) const override;
    std::vector<Outcome> order_batch(std::span<const ShuffledInstance> instances) const override;

    /// Name announced in the most recent handshake, empty before the first one.
    std::string endpoint_name() const;

private:
    struct Connection {
        std::unique_ptr<LineChannel> channel;
    };

    std::unique_ptr<Connection> acquire() const;
    void release(std::unique_ptr<Connection> connection) const;

    ExternalConfig config_;
    mutable std::mutex mutex_;
    mutable std::vector<std::unique_ptr<Connection>> idle_;
    mutable std::string endpoint_name_;
};

} // namespace orderbench

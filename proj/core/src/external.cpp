#include "orderbench/external.hpp"

#include "orderbench/error.hpp"
#include "orderbench/protocol.hpp"

#include <cstdlib>
#include <unordered_map>

namespace orderbench {

std::chrono::milliseconds timeout_from_env(std::chrono::milliseconds fallback)
{
    const char* raw = std::getenv("ORDER_BENCH_TIMEOUT_SECS");
    if (raw == nullptr || *raw == '\0') {
        return fallback;
    }
    char* end = nullptr;
    const double seconds = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(seconds > 0)) {
        throw UsageError("ORDER_BENCH_TIMEOUT_SECS must be a positive number of seconds, got '" + std::string(raw) + "'");
    }
    return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

ExternalOrderer::ExternalOrderer(ExternalConfig config) : config_(std::move(config))
{
    if (config_.pipeline_depth == 0) {
        config_.pipeline_depth = 1;
    }
}

ExternalOrderer::~ExternalOrderer() = default;

std::string ExternalOrderer::endpoint_name() const
{
    std::lock_guard lock(mutex_);
    return endpoint_name_;
}

std::unique_ptr<ExternalOrderer::Connection> ExternalOrderer::acquire() const
{
    {
        std::lock_guard lock(mutex_);
        if (!idle_.empty()) {
            auto connection = std::move(idle_.back());
            idle_.pop_back();
            return connection;
        }
    }
    auto connection = std::make_unique<Connection>();
    connection->channel = config_.connect ? config_.connect() : open_channel(config_.uri);
    connection->channel->write_line(handshake_request_line());
    const auto reply = connection->channel->read_line(config_.timeout);
    if (!reply) {
        throw TimeoutError("endpoint did not answer the handshake within " +
                           std::to_string(config_.timeout.count()) + " ms");
    }
    auto name = parse_handshake_reply(*reply);
    std::lock_guard lock(mutex_);
    endpoint_name_ = std::move(name);
    return connection;
}

void ExternalOrderer::release(std::unique_ptr<Connection> connection) const
{
    std::lock_guard lock(mutex_);
    idle_.push_back(std::move(connection));
}

Prediction ExternalOrderer::order(const ShuffledInstance& instance) const
{
    auto outcome = order_batch(std::span(&instance, 1)).front();
    if (!outcome.prediction) {
        throw ProtocolError(outcome.error);
    }
    return std::move(*outcome.prediction);
}

std::vector<Outcome> ExternalOrderer::order_batch(std::span<const ShuffledInstance> instances) const
{
    std::vector<Outcome> outcomes(instances.size(), Outcome::failed("not attempted"));
    std::vector<MarkedInput> inputs(instances.size());
    std::size_t next = 0;
    while (next < instances.size()) {
        std::unique_ptr<Connection> connection;
        try {
            connection = acquire();
        } catch (const Error& e) {
            outcomes[next] = Outcome::failed(e.what());
            ++next;
            continue;
        }

        std::unordered_map<std::string, std::size_t> pending;
        try {
            while (next < instances.size() || !pending.empty()) {
                while (next < instances.size() && pending.size() < config_.pipeline_depth) {
                    const auto& instance = instances[next];
                    if (pending.contains(instance.id)) {
                        break; // wait for the earlier request with this id
                    }
                    try {
                        inputs[next] = encode_input(instance, config_.mode);
                    } catch (const UsageError& e) {
                        outcomes[next] = Outcome::failed(e.what());
                        ++next;
                        continue;
                    }
                    connection->channel->write_line(to_line(make_request(instance, inputs[next])));
                    pending.emplace(instance.id, next);
                    ++next;
                }
                if (pending.empty()) {
                    continue;
                }
                const auto line = connection->channel->read_line(config_.timeout);
                if (!line) {
                    throw TimeoutError("no reply within " + std::to_string(config_.timeout.count()) + " ms");
                }
                const OrderReply reply = parse_reply(*line);
                const auto it = pending.find(reply.id);
                if (it == pending.end()) {
                    throw ProtocolError("reply for unknown instance id '" + reply.id + "'");
                }
                const std::size_t index = it->second;
                pending.erase(it);
                auto decoded = decode_output(reply.output, inputs[index]);
                outcomes[index] = Outcome::ok({std::move(decoded.y), decoded.repaired});
            }
            release(std::move(connection));
        } catch (const Error& e) {
            if (pending.empty()) {
                // Nothing in flight, so the failure belongs to the instance being sent.
                outcomes[next] = Outcome::failed(e.what());
                ++next;
            }
            for (const auto& [id, index] : pending) {
                outcomes[index] = Outcome::failed(e.what());
            }
            // The connection is discarded; later instances use a fresh one.
        }
    }
    return outcomes;
}

} // namespace orderbench

#pragma once

#include "orderbench/codec.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace orderbench {

/// Newline-delimited JSON spoken between the harness and an external orderer.
///
///   harness  -> {"protocol": "order-bench/1"}
///   endpoint -> {"protocol": "order-bench/1", "name": "..."}
///   harness  -> {"id": "...", "text": "...", "n": 3, "markers": [1, 2, 3]}
///   endpoint -> {"id": "...", "output": "2 1 3"}
///
/// Requests may be pipelined and replies may come back in any order.
inline constexpr std::string_view kProtocolVersion = "order-bench/1";

struct OrderRequest {
    std::string id;
    std::string text;
    std::size_t n = 0;
    std::vector<int> markers;

    friend bool operator==(const OrderRequest&, const OrderRequest&) = default;
};

struct OrderReply {
    std::string id;
    std::string output;

    friend bool operator==(const OrderReply&, const OrderReply&) = default;
};

std::string handshake_request_line();
std::string handshake_reply_line(std::string_view endpoint_name);

/// Throws ProtocolError unless the line is a handshake for kProtocolVersion.
void check_handshake_request(std::string_view line);
/// Returns the endpoint name. Throws ProtocolError on a version mismatch.
std::string parse_handshake_reply(std::string_view line);

OrderRequest make_request(const ShuffledInstance& instance, const MarkedInput& input);

std::string to_line(const OrderRequest& request);
std::string to_line(const OrderReply& reply);
/// Both throw ProtocolError on malformed messages.
OrderRequest parse_request(std::string_view line);
OrderReply parse_reply(std::string_view line);

/// {"error": "..."} sent before an endpoint closes a rejected connection.
std::string error_line(std::string_view message);

} // namespace orderbench

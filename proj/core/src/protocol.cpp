#include "orderbench/protocol.hpp"

#include "orderbench/error.hpp"

#include <json.hpp>

namespace orderbench {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json parse_object(std::string_view line, std::string_view what)
{
    json message;
    try {
        message = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ProtocolError("malformed " + std::string(what) + ": " + e.what());
    }
    if (!message.is_object()) {
        throw ProtocolError(std::string(what) + " is not a JSON object");
    }
    return message;
}

std::string string_field(const json& message, const char* key, std::string_view what)
{
    const auto it = message.find(key);
    if (it == message.end() || !it->is_string()) {
        throw ProtocolError(std::string(what) + " lacks a string \"" + key + "\"");
    }
    return it->get<std::string>();
}

} // namespace

std::string handshake_request_line()
{
    ordered_json message;
    message["protocol"] = kProtocolVersion;
    return message.dump();
}

std::string handshake_reply_line(std::string_view endpoint_name)
{
    ordered_json message;
    message["protocol"] = kProtocolVersion;
    message["name"] = endpoint_name;
    return message.dump();
}

void check_handshake_request(std::string_view line)
{
    const json message = parse_object(line, "handshake");
    const auto version = string_field(message, "protocol", "handshake");
    if (version != kProtocolVersion) {
        throw ProtocolError("unsupported protocol '" + version + "', expected '" + std::string(kProtocolVersion) + "'");
    }
}

std::string parse_handshake_reply(std::string_view line)
{
    const json message = parse_object(line, "handshake reply");
    if (const auto err = message.find("error"); err != message.end() && err->is_string()) {
        throw ProtocolError("endpoint rejected handshake: " + err->get<std::string>());
    }
    const auto version = string_field(message, "protocol", "handshake reply");
    if (version != kProtocolVersion) {
        throw ProtocolError("endpoint speaks '" + version + "', expected '" + std::string(kProtocolVersion) + "'");
    }
    return string_field(message, "name", "handshake reply");
}

OrderRequest make_request(const ShuffledInstance& instance, const MarkedInput& input)
{
    return {instance.id, input.text, instance.size(), input.marker_of_slot};
}

std::string to_line(const OrderRequest& request)
{
    ordered_json message;
    message["id"] = request.id;
    message["text"] = request.text;
    message["n"] = request.n;
    message["markers"] = request.markers;
    return message.dump();
}

std::string to_line(const OrderReply& reply)
{
    ordered_json message;
    message["id"] = reply.id;
    message["output"] = reply.output;
    return message.dump();
}

OrderRequest parse_request(std::string_view line)
{
    const json message = parse_object(line, "request");
    OrderRequest request;
    request.id = string_field(message, "id", "request");
    request.text = string_field(message, "text", "request");
    const auto n = message.find("n");
    if (n == message.end() || !n->is_number_unsigned()) {
        throw ProtocolError("request lacks a non-negative integer \"n\"");
    }
    request.n = n->get<std::size_t>();
    const auto markers = message.find("markers");
    if (markers == message.end() || !markers->is_array()) {
        throw ProtocolError("request lacks a \"markers\" array");
    }
    for (const auto& m : *markers) {
        if (!m.is_number_integer()) {
            throw ProtocolError("request marker labels must be integers");
        }
        request.markers.push_back(m.get<int>());
    }
    if (request.markers.size() != request.n) {
        throw ProtocolError("request carries " + std::to_string(request.markers.size()) + " markers for n = " +
                            std::to_string(request.n));
    }
    return request;
}

OrderReply parse_reply(std::string_view line)
{
    const json message = parse_object(line, "reply");
    if (const auto err = message.find("error"); err != message.end() && err->is_string() && !message.contains("id")) {
        throw ProtocolError("endpoint error: " + err->get<std::string>());
    }
    return {string_field(message, "id", "reply"), string_field(message, "output", "reply")};
}

std::string error_line(std::string_view message)
{
    ordered_json out;
    out["error"] = message;
    return out.dump();
}

} // namespace orderbench

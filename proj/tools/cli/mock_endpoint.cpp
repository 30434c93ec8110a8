#include "cli/mock_endpoint.hpp"

#include <orderbench/error.hpp>
#include <orderbench/random.hpp>

#include <charconv>
#include <iostream>

namespace orderbench::cli {

MockBehaviour MockBehaviour::parse(std::string_view text)
{
    if (text == "gold") {
        return {Kind::gold, 0.0};
    }
    if (text == "invalid") {
        return {Kind::invalid, 0.0};
    }
    constexpr std::string_view noisy = "noisy:";
    if (text.starts_with(noisy)) {
        const std::string value(text.substr(noisy.size()));
        char* end = nullptr;
        const double p = std::strtod(value.c_str(), &end);
        if (!value.empty() && *end == '\0' && p >= 0.0 && p <= 1.0) {
            return {Kind::noisy, p};
        }
    }
    throw UsageError("mock mode must be gold, invalid or noisy:<p> with 0 <= p <= 1, got '" + std::string(text) + "'");
}

namespace {

bool match_unmarked(std::string_view body, const std::vector<std::string>& candidates, std::vector<bool>& used,
                    std::vector<std::string>& out)
{
    if (out.size() == candidates.size()) {
        return body.empty();
    }
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto& c = candidates[k];
        if (used[k] || !body.starts_with(c)) {
            continue;
        }
        std::string_view rest = body.substr(c.size());
        if (!rest.empty()) {
            if (rest.front() != ' ') {
                continue;
            }
            rest.remove_prefix(1);
        }
        used[k] = true;
        out.push_back(c);
        if (match_unmarked(rest, candidates, used, out)) {
            return true;
        }
        out.pop_back();
        used[k] = false;
    }
    return false;
}

std::string marker_token(int label)
{
    return "<S" + std::to_string(label) + ">";
}

} // namespace

std::optional<std::vector<std::string>> split_encoded_text(const OrderRequest& request,
                                                           const std::vector<std::string>& candidates)
{
    const std::string prefix = std::string(kBeginToken) + " ";
    const std::string suffix = " " + std::string(kEndToken);
    std::string_view text = request.text;
    if (!text.starts_with(prefix) || !text.ends_with(suffix) || text.size() < prefix.size() + suffix.size()) {
        return std::nullopt;
    }
    std::string_view body = text.substr(prefix.size(), text.size() - prefix.size() - suffix.size());

    const bool marked = !request.markers.empty() && body.starts_with(marker_token(request.markers.front()) + " ");
    std::vector<std::string> out;
    if (!marked) {
        std::vector<bool> used(candidates.size(), false);
        if (candidates.size() != request.n || !match_unmarked(body, candidates, used, out)) {
            return std::nullopt;
        }
        return out;
    }
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < request.markers.size(); ++j) {
        const std::string head = marker_token(request.markers[j]) + " ";
        if (body.substr(cursor, head.size()) != head) {
            return std::nullopt;
        }
        cursor += head.size();
        std::size_t stop = body.size();
        if (j + 1 < request.markers.size()) {
            stop = body.find(" " + marker_token(request.markers[j + 1]) + " ", cursor);
            if (stop == std::string_view::npos) {
                return std::nullopt;
            }
        }
        out.emplace_back(body.substr(cursor, stop - cursor));
        cursor = stop + (stop < body.size() ? 1 : 0);
    }
    return out;
}

MockEndpoint::MockEndpoint(Corpus gold, MockBehaviour behaviour, std::uint64_t seed, std::string name)
    : gold_(std::move(gold)), behaviour_(behaviour), seed_(seed), name_(std::move(name))
{
    for (std::size_t i = 0; i < gold_.documents.size(); ++i) {
        by_id_.emplace(gold_.documents[i].id, i);
    }
}

const Document* MockEndpoint::find(const std::string& instance_id) const
{
    if (const auto it = by_id_.find(instance_id); it != by_id_.end()) {
        return &gold_.documents[it->second];
    }
    // Repeated shuffles carry a "#r<k>" suffix.
    if (const auto hash = instance_id.rfind("#r"); hash != std::string::npos) {
        if (const auto it = by_id_.find(instance_id.substr(0, hash)); it != by_id_.end()) {
            return &gold_.documents[it->second];
        }
    }
    return nullptr;
}

std::optional<std::vector<int>> MockEndpoint::gold_labels(const OrderRequest& request) const
{
    const Document* found = find(request.id);
    if (found == nullptr || request.n == 0) {
        return std::nullopt;
    }
    const Document doc = truncate(*found, request.n);
    if (doc.size() != request.n) {
        return std::nullopt;
    }
    const auto shuffled = split_encoded_text(request, doc.sentences);
    if (!shuffled || shuffled->size() != request.n) {
        return std::nullopt;
    }
    std::vector<bool> taken(request.n, false);
    std::vector<int> labels;
    labels.reserve(request.n);
    for (const auto& sentence : doc.sentences) {
        std::size_t slot = request.n;
        for (std::size_t j = 0; j < request.n; ++j) {
            if (!taken[j] && (*shuffled)[j] == sentence) {
                slot = j;
                break;
            }
        }
        if (slot == request.n) {
            return std::nullopt;
        }
        taken[slot] = true;
        labels.push_back(request.markers[slot]);
    }
    return labels;
}

OrderReply MockEndpoint::answer(const OrderRequest& request) const
{
    auto labels = gold_labels(request);
    if (!labels) {
        std::cerr << "mock: cannot match request '" << request.id << "' against the gold corpus\n";
        return {request.id, ""};
    }
    Rng rng(derive_seed(seed_, request.id, "mock"));
    switch (behaviour_.kind) {
    case MockBehaviour::Kind::gold:
        break;
    case MockBehaviour::Kind::noisy:
        if (labels->size() >= 2 && rng.unit() < behaviour_.swap_probability) {
            const auto k = rng.below(labels->size() - 1);
            std::swap((*labels)[k], (*labels)[k + 1]);
        }
        break;
    case MockBehaviour::Kind::invalid: {
        int unknown = 0;
        for (int m : request.markers) {
            unknown = std::max(unknown, m);
        }
        switch (rng.below(4)) {
        case 0:
            return {request.id, "no idea"};
        case 1:
            return {request.id, std::to_string(labels->front()) + " " + std::to_string(labels->front())};
        case 2:
            labels->front() = unknown + 1000;
            break;
        default:
            labels->pop_back();
            break;
        }
        break;
    }
    }
    return {request.id, format_markers(*labels)};
}

void MockEndpoint::serve(LineChannel& channel) const
{
    constexpr auto wait = std::chrono::hours(24);
    try {
        std::optional<std::string> line;
        while (!(line = channel.read_line(wait))) {
        }
        try {
            check_handshake_request(*line);
        } catch (const ProtocolError& e) {
            channel.write_line(error_line(e.what()));
            return;
        }
        channel.write_line(handshake_reply_line(name_));
        while (true) {
            line = channel.read_line(wait);
            if (!line) {
                continue;
            }
            if (line->empty()) {
                continue;
            }
            try {
                channel.write_line(to_line(answer(parse_request(*line))));
            } catch (const ProtocolError& e) {
                channel.write_line(error_line(e.what()));
                return;
            }
        }
    } catch (const ProtocolError&) {
        // Peer closed the connection.
    }
}

} // namespace orderbench::cli

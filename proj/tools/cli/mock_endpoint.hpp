#pragma once

#include <orderbench/channel.hpp>
#include <orderbench/corpus.hpp>
#include <orderbench/protocol.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace orderbench::cli {

/// Behaviour of the protocol conformance fixture.
struct MockBehaviour {
    enum class Kind { gold, noisy, invalid };

    Kind kind = Kind::gold;
    double swap_probability = 0.0; ///< noisy only

    /// "gold", "invalid" or "noisy:<p>" with p in [0, 1].
    static MockBehaviour parse(std::string_view text);
};

/// Answers order requests from a gold corpus.
///
/// gold replies with the gold marker labels, noisy swaps one random adjacent
/// pair of them with the configured probability, and invalid always replies
/// with something that needs repair (empty, duplicated, unknown label or
/// truncated output).
class MockEndpoint {
public:
    MockEndpoint(Corpus gold, MockBehaviour behaviour, std::uint64_t seed, std::string name = "mock");

    const std::string& name() const { return name_; }

    OrderReply answer(const OrderRequest& request) const;

    /// Gold marker labels for a request, or nullopt if the request cannot be
    /// matched against the corpus.
    std::optional<std::vector<int>> gold_labels(const OrderRequest& request) const;

    /// Serves one connection until the peer closes it. A failed handshake is
    /// answered with an error message and ends the connection.
    void serve(LineChannel& channel) const;

private:
    const Document* find(const std::string& instance_id) const;

    Corpus gold_;
    std::unordered_map<std::string, std::size_t> by_id_;
    MockBehaviour behaviour_;
    std::uint64_t seed_;
    std::string name_;
};

/// Recovers the shuffled sentence list from an encoded request, using the
/// candidate sentences when the text carries no markers.
std::optional<std::vector<std::string>> split_encoded_text(const OrderRequest& request,
                                                           const std::vector<std::string>& candidates);

} // namespace orderbench::cli

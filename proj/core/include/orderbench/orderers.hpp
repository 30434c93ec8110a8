#pragma once

#include "orderbench/permutation.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace orderbench {

/// A predicted marker sequence Y. repaired is set when the raw output had to
/// be normalised into a valid permutation.
struct Prediction {
    Permutation y;
    bool repaired = false;
};

/// Result of ordering one instance: a prediction, or the reason there is none.
struct Outcome {
    std::optional<Prediction> prediction;
    std::string error;

    static Outcome ok(Prediction p) { return {std::move(p), {}}; }
    static Outcome failed(std::string message) { return {std::nullopt, std::move(message)}; }
};

/// Maps a shuffled instance to a predicted marker sequence.
///
/// Implementations are immutable once built and order() may be called from
/// several threads at once. Output must be a valid permutation of the
/// instance size and must not depend on call order.
class Orderer {
public:
    virtual ~Orderer() = default;

    virtual std::string name() const = 0;

    /// Throws ProtocolError (or any Error) when no prediction can be produced.
    virtual Prediction order(const ShuffledInstance& instance) const = 0;

    /// Orders a batch; errors are reported per instance. The default calls
    /// order() for each element.
    virtual std::vector<Outcome> order_batch(std::span<const ShuffledInstance> instances) const;
};

/// Predicts that the shuffled order is already correct.
class IdentityOrderer final : public Orderer {
public:
    std::string name() const override { return "identity"; }
    Prediction order(const ShuffledInstance& instance) const override;
};

/// Uniform random prediction keyed by (seed, instance id).
class RandomOrderer final : public Orderer {
public:
    explicit RandomOrderer(std::uint64_t seed) : seed_(seed) {}

    std::string name() const override { return "random"; }
    Prediction order(const ShuffledInstance& instance) const override;

private:
    std::uint64_t seed_;
};

/// Returns the gold markers; the upper bound of every metric.
class GoldOrderer final : public Orderer {
public:
    std::string name() const override { return "gold"; }
    Prediction order(const ShuffledInstance& instance) const override;
};

} // namespace orderbench

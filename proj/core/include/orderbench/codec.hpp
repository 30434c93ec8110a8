#pragma once

#include "orderbench/permutation.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orderbench {

inline constexpr std::string_view kBeginToken = "[shuffled]";
inline constexpr std::string_view kEndToken = "[orig]";
/// Random marker labels are drawn without replacement from {0..kMaxRandomLabel}.
inline constexpr int kMaxRandomLabel = 100;

/// How sentence markers are attached to the shuffled input.
struct MarkerMode {
    enum class Kind { sequential, random, none };

    Kind kind = Kind::sequential;
    std::uint64_t seed = 0; ///< only used by Kind::random

    static MarkerMode sequential() { return {Kind::sequential, 0}; }
    static MarkerMode random(std::uint64_t seed) { return {Kind::random, seed}; }
    static MarkerMode none() { return {Kind::none, 0}; }

    /// "seq", "random" or "none".
    std::string name() const;
    static MarkerMode parse(std::string_view name, std::uint64_t seed);

    friend bool operator==(const MarkerMode&, const MarkerMode&) = default;
};

/// Encoder input. marker_of_slot[j - 1] is the label of shuffled slot j; in
/// marker-free mode the labels are the slot numbers themselves and do not
/// appear in text.
struct MarkedInput {
    std::string text;
    std::vector<int> marker_of_slot;
    bool has_markers = true;
};

/// Integers as decoded from model output, possibly invalid.
struct RawPrediction {
    std::vector<std::int64_t> tokens;
};

/// "[shuffled] <S3> s'_1 <S1> s'_2 ... [orig]". Random-mode labels are seeded
/// by (mode.seed, instance.id). Throws UsageError in random mode with more
/// than 101 sentences.
MarkedInput encode_input(const ShuffledInstance& instance, const MarkerMode& mode);

/// Every maximal run of decimal digits, in order. Runs too long for int64 saturate.
RawPrediction parse_output(std::string_view raw_text);

/// Maps marker labels back to 1-based slots. Labels that name no slot become 0.
RawPrediction labels_to_slots(const RawPrediction& labels, std::span<const int> marker_of_slot);

bool is_valid_prediction(const RawPrediction& raw, std::size_t n);

/// Total, idempotent normalisation into a permutation of size n: drop values
/// outside 1..n, keep first occurrences, truncate to n, then append the
/// missing values in ascending order.
Permutation repair(const RawPrediction& raw, std::size_t n);

/// Element i is the shuffled sentence at slot y.at(i).
std::vector<std::string> reconstruct(const ShuffledInstance& instance, const Permutation& y);

/// Space-separated integers, e.g. "2 1 3".
std::string format_markers(std::span<const int> markers);

/// Target string for an encoded instance: the labels of the gold slots in gold order.
std::string gold_marker_text(const ShuffledInstance& instance, const MarkedInput& input);

struct DecodedOutput {
    Permutation y;
    bool repaired = false;
};

/// parse_output, then labels_to_slots, then repair.
DecodedOutput decode_output(std::string_view raw_text, const MarkedInput& input);

} // namespace orderbench

#include "orderbench/codec.hpp"

#include "orderbench/error.hpp"
#include "orderbench/random.hpp"

#include <limits>
#include <numeric>
#include <unordered_map>

namespace orderbench {

std::string MarkerMode::name() const
{
    switch (kind) {
    case Kind::sequential:
        return "seq";
    case Kind::random:
        return "random";
    case Kind::none:
        return "none";
    }
    return "seq";
}

MarkerMode MarkerMode::parse(std::string_view name, std::uint64_t seed)
{
    if (name == "seq" || name == "sequential") {
        return sequential();
    }
    if (name == "random") {
        return random(seed);
    }
    if (name == "none") {
        return none();
    }
    throw UsageError("unknown marker mode '" + std::string(name) + "' (expected seq, random or none)");
}

MarkedInput encode_input(const ShuffledInstance& instance, const MarkerMode& mode)
{
    const std::size_t n = instance.shuffled.size();
    MarkedInput out;
    out.marker_of_slot.resize(n);
    switch (mode.kind) {
    case MarkerMode::Kind::random: {
        if (n > static_cast<std::size_t>(kMaxRandomLabel) + 1) {
            throw UsageError("random markers support at most " + std::to_string(kMaxRandomLabel + 1) +
                             " sentences, instance '" + instance.id + "' has " + std::to_string(n));
        }
        std::vector<int> labels(kMaxRandomLabel + 1);
        std::iota(labels.begin(), labels.end(), 0);
        Rng rng(derive_seed(mode.seed, instance.id, "markers"));
        for (std::size_t i = 0; i < n; ++i) {
            std::swap(labels[i], labels[i + rng.below(labels.size() - i)]);
        }
        std::copy_n(labels.begin(), n, out.marker_of_slot.begin());
        break;
    }
    case MarkerMode::Kind::sequential:
    case MarkerMode::Kind::none:
        std::iota(out.marker_of_slot.begin(), out.marker_of_slot.end(), 1);
        break;
    }
    out.has_markers = mode.kind != MarkerMode::Kind::none;

    out.text = kBeginToken;
    for (std::size_t j = 0; j < n; ++j) {
        if (out.has_markers) {
            out.text += " <S";
            out.text += std::to_string(out.marker_of_slot[j]);
            out.text += '>';
        }
        out.text += ' ';
        out.text += instance.shuffled[j];
    }
    out.text += ' ';
    out.text += kEndToken;
    return out;
}

RawPrediction parse_output(std::string_view raw_text)
{
    constexpr auto cap = std::numeric_limits<std::int64_t>::max();
    RawPrediction out;
    std::size_t i = 0;
    while (i < raw_text.size()) {
        if (raw_text[i] < '0' || raw_text[i] > '9') {
            ++i;
            continue;
        }
        std::int64_t value = 0;
        for (; i < raw_text.size() && raw_text[i] >= '0' && raw_text[i] <= '9'; ++i) {
            const int digit = raw_text[i] - '0';
            value = value > (cap - digit) / 10 ? cap : value * 10 + digit;
        }
        out.tokens.push_back(value);
    }
    return out;
}

RawPrediction labels_to_slots(const RawPrediction& labels, std::span<const int> marker_of_slot)
{
    std::unordered_map<std::int64_t, std::int64_t> slot_of;
    for (std::size_t j = 0; j < marker_of_slot.size(); ++j) {
        slot_of.emplace(marker_of_slot[j], static_cast<std::int64_t>(j + 1));
    }
    RawPrediction out;
    out.tokens.reserve(labels.tokens.size());
    for (auto label : labels.tokens) {
        const auto it = slot_of.find(label);
        out.tokens.push_back(it == slot_of.end() ? 0 : it->second);
    }
    return out;
}

bool is_valid_prediction(const RawPrediction& raw, std::size_t n)
{
    if (raw.tokens.size() != n) {
        return false;
    }
    std::vector<bool> seen(n + 1, false);
    for (auto t : raw.tokens) {
        if (t < 1 || static_cast<std::uint64_t>(t) > n || seen[static_cast<std::size_t>(t)]) {
            return false;
        }
        seen[static_cast<std::size_t>(t)] = true;
    }
    return true;
}

Permutation repair(const RawPrediction& raw, std::size_t n)
{
    if (n == 0) {
        throw UsageError("repair needs a positive size");
    }
    std::vector<bool> used(n + 1, false);
    std::vector<int> out;
    out.reserve(n);
    for (auto t : raw.tokens) {
        if (out.size() == n) {
            break;
        }
        if (t < 1 || static_cast<std::uint64_t>(t) > n || used[static_cast<std::size_t>(t)]) {
            continue;
        }
        used[static_cast<std::size_t>(t)] = true;
        out.push_back(static_cast<int>(t));
    }
    for (std::size_t v = 1; v <= n; ++v) {
        if (!used[v]) {
            out.push_back(static_cast<int>(v));
        }
    }
    return Permutation(std::move(out));
}

std::vector<std::string> reconstruct(const ShuffledInstance& instance, const Permutation& y)
{
    if (y.size() != instance.shuffled.size()) {
        throw DataError("reconstruct: prediction of size " + std::to_string(y.size()) + " for instance '" +
                        instance.id + "' with " + std::to_string(instance.shuffled.size()) + " sentences");
    }
    std::vector<std::string> out;
    out.reserve(y.size());
    for (int slot : y.values()) {
        out.push_back(instance.shuffled[static_cast<std::size_t>(slot - 1)]);
    }
    return out;
}

std::string format_markers(std::span<const int> markers)
{
    std::string out;
    for (std::size_t i = 0; i < markers.size(); ++i) {
        if (i) {
            out += ' ';
        }
        out += std::to_string(markers[i]);
    }
    return out;
}

std::string gold_marker_text(const ShuffledInstance& instance, const MarkedInput& input)
{
    std::vector<int> labels;
    labels.reserve(instance.gold.size());
    for (int slot : instance.gold.values()) {
        labels.push_back(input.marker_of_slot.at(static_cast<std::size_t>(slot - 1)));
    }
    return format_markers(labels);
}

DecodedOutput decode_output(std::string_view raw_text, const MarkedInput& input)
{
    const RawPrediction slots = labels_to_slots(parse_output(raw_text), input.marker_of_slot);
    const std::size_t n = input.marker_of_slot.size();
    return {repair(slots, n), !is_valid_prediction(slots, n)};
}

} // namespace orderbench

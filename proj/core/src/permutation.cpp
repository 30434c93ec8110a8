#include "orderbench/permutation.hpp"

#include "orderbench/error.hpp"

#include <algorithm>
#include <numeric>

namespace orderbench {

Permutation::Permutation(std::vector<int> one_based) : values_(std::move(one_based))
{
    if (!is_valid(values_)) {
        std::string shown = "[";
        for (std::size_t i = 0; i < values_.size() && i < 32; ++i) {
            shown += (i ? "," : "") + std::to_string(values_[i]);
        }
        shown += values_.size() > 32 ? ",...]" : "]";
        throw DataError("not a permutation of 1.." + std::to_string(values_.size()) + ": " + shown);
    }
}

bool Permutation::is_valid(std::span<const int> values)
{
    const auto n = values.size();
    std::vector<bool> seen(n + 1, false);
    for (int v : values) {
        if (v < 1 || static_cast<std::size_t>(v) > n || seen[static_cast<std::size_t>(v)]) {
            return false;
        }
        seen[static_cast<std::size_t>(v)] = true;
    }
    return true;
}

Permutation Permutation::identity(std::size_t n)
{
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 1);
    return Permutation(std::move(v));
}

Permutation Permutation::inverse() const
{
    std::vector<int> inv(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        inv[static_cast<std::size_t>(values_[i] - 1)] = static_cast<int>(i + 1);
    }
    return Permutation(std::move(inv));
}

Permutation Permutation::reversed() const
{
    return Permutation(std::vector<int>(values_.rbegin(), values_.rend()));
}

bool Permutation::is_identity() const
{
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] != static_cast<int>(i + 1)) {
            return false;
        }
    }
    return true;
}

std::size_t Permutation::cycle_count() const
{
    std::vector<bool> visited(values_.size(), false);
    std::size_t cycles = 0;
    for (std::size_t start = 0; start < values_.size(); ++start) {
        if (visited[start]) {
            continue;
        }
        ++cycles;
        for (std::size_t i = start; !visited[i]; i = static_cast<std::size_t>(values_[i] - 1)) {
            visited[i] = true;
        }
    }
    return cycles;
}

std::string Permutation::to_string() const
{
    std::string out = "[";
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += std::to_string(values_[i]);
    }
    return out + "]";
}

Permutation sample_shuffle(std::size_t n, Rng& rng)
{
    if (n == 0) {
        throw UsageError("cannot sample a permutation of size 0");
    }
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 1);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(v[i], v[rng.below(i + 1)]);
    }
    return Permutation(std::move(v));
}

Permutation sample_shuffle(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    return sample_shuffle(n, rng);
}

std::size_t min_swaps(const Permutation& p)
{
    return p.size() - p.cycle_count();
}

Rational normalized_shuffle_degree(const Permutation& p)
{
    if (p.empty()) {
        return Rational(0);
    }
    return Rational(static_cast<long long>(min_swaps(p)), static_cast<long long>(p.size()));
}

std::size_t count_inversions(const Permutation& p, const Permutation& reference)
{
    if (p.size() != reference.size()) {
        throw DataError("count_inversions: size mismatch (" + std::to_string(p.size()) + " vs " +
                        std::to_string(reference.size()) + ")");
    }
    const std::size_t n = p.size();
    // rank[v] = position of value v in the reference ordering.
    std::vector<std::size_t> rank(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        rank[static_cast<std::size_t>(reference.at(i))] = i;
    }
    // Fenwick tree over reference ranks; count earlier elements with a larger rank.
    std::vector<std::size_t> tree(n + 1, 0);
    std::size_t inversions = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t r = rank[static_cast<std::size_t>(p.at(i))];
        std::size_t not_greater = 0;
        for (std::size_t k = r; k > 0; k -= k & (~k + 1)) {
            not_greater += tree[k];
        }
        inversions += (i - 1) - not_greater;
        for (std::size_t k = r; k <= n; k += k & (~k + 1)) {
            ++tree[k];
        }
    }
    return inversions;
}

ShuffledInstance ShuffledInstance::make(Document doc, Permutation gold_markers, std::string id)
{
    if (gold_markers.size() != doc.size()) {
        throw DataError("shuffle of size " + std::to_string(gold_markers.size()) + " does not fit document '" +
                        doc.id + "' with " + std::to_string(doc.size()) + " sentences");
    }
    ShuffledInstance instance;
    instance.id = id.empty() ? doc.id : std::move(id);
    instance.shuffled.resize(doc.size());
    for (std::size_t i = 1; i <= doc.size(); ++i) {
        instance.shuffled[static_cast<std::size_t>(gold_markers.at(i) - 1)] = doc.sentences[i - 1];
    }
    instance.doc = std::move(doc);
    instance.gold = std::move(gold_markers);
    return instance;
}

ShuffledInstance shuffle_document(const Document& doc, std::uint64_t seed, std::string instance_id)
{
    return ShuffledInstance::make(doc, sample_shuffle(doc.size(), seed), std::move(instance_id));
}

Rational relative_displacement(std::size_t i, const ShuffledInstance& instance)
{
    const std::size_t n = instance.size();
    if (i < 1 || i > n) {
        throw DataError("sentence index " + std::to_string(i) + " out of range 1.." + std::to_string(n));
    }
    const auto j = static_cast<long long>(instance.gold.at(i));
    const auto pos = static_cast<long long>(i);
    return Rational(pos > j ? pos - j : j - pos, static_cast<long long>(n));
}

} // namespace orderbench

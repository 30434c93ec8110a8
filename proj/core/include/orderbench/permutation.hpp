#pragma once

#include "orderbench/corpus.hpp"
#include "orderbench/random.hpp"
#include "orderbench/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace orderbench {

/// A bijection on {1..n}. Every interface is 1-based; position i holds value at(i).
class Permutation {
public:
    Permutation() = default;

    /// Throws DataError unless the values are exactly {1..n} in some order.
    explicit Permutation(std::vector<int> one_based);

    static Permutation identity(std::size_t n);
    static bool is_valid(std::span<const int> values);

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    /// Value at 1-based position i.
    int at(std::size_t i) const { return values_.at(i - 1); }
    std::span<const int> values() const { return values_; }

    Permutation inverse() const;
    Permutation reversed() const;
    bool is_identity() const;
    std::size_t cycle_count() const;

    /// JSON-style rendering, e.g. "[2,1,3]".
    std::string to_string() const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> values_;
};

/// Uniform over all n! permutations (the identity included).
Permutation sample_shuffle(std::size_t n, Rng& rng);
Permutation sample_shuffle(std::size_t n, std::uint64_t seed);

/// Fewest transpositions turning p into the identity: n minus the number of cycles.
std::size_t min_swaps(const Permutation& p);

/// min_swaps(p) / n, always in [0, 1).
Rational normalized_shuffle_degree(const Permutation& p);

/// Pairs ordered one way in p and the other way in reference. O(n log n).
/// Throws DataError on a size mismatch.
std::size_t count_inversions(const Permutation& p, const Permutation& reference);

/// A document together with the shuffle presented to an orderer.
///
/// gold holds Y*: gold.at(i) is the slot of gold sentence s_i inside the
/// shuffled list, so shuffled[gold.at(i) - 1] == doc.sentences[i - 1].
struct ShuffledInstance {
    std::string id;
    Document doc;
    std::vector<std::string> shuffled;
    Permutation gold;

    std::size_t size() const { return doc.size(); }

    /// Lays the gold sentences out according to gold_markers. The id defaults to doc.id.
    static ShuffledInstance make(Document doc, Permutation gold_markers, std::string id = {});
};

/// Seeded uniform shuffle of a document.
ShuffledInstance shuffle_document(const Document& doc, std::uint64_t seed, std::string instance_id = {});

/// |i - j| / N_S where s_i sits at shuffled slot j. Throws DataError if i is out of range.
Rational relative_displacement(std::size_t i, const ShuffledInstance& instance);

} // namespace orderbench

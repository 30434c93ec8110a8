#pragma once

#include "orderbench/corpus.hpp"
#include "orderbench/orderers.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orderbench {

struct PairwiseConfig {
    std::size_t epochs = 5;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
    unsigned hash_bits = 18;
    /// Train against a fresh random order per document instead of the gold
    /// order (the shuffled-target ablation).
    bool corrupt_targets = false;
};

/// Square matrix of precedence margins: positive at (i, j) means slot i
/// should come before slot j. Indices are 0-based.
class PrecedenceMatrix {
public:
    explicit PrecedenceMatrix(std::size_t n) : n_(n), cells_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }

private:
    std::size_t n_;
    std::vector<double> cells_;
};

/// Logistic precedence classifier over hashed lexical features of a sentence pair.
///
/// Features of (first, second): unigrams of each side tagged by side, the
/// leading token of each side, and the sign of the length difference.
class PairwiseModel {
public:
    explicit PairwiseModel(unsigned hash_bits = 18);

    unsigned hash_bits() const { return hash_bits_; }
    std::span<const double> weights() const { return weights_; }
    double bias() const { return bias_; }

    std::vector<std::uint32_t> features(std::string_view first, std::string_view second) const;

    /// Log-odds that `first` precedes `second`.
    double logit(std::string_view first, std::string_view second) const;
    double probability(std::string_view first, std::string_view second) const;

    /// Logits for every ordered pair of distinct sentences; the diagonal is zero.
    PrecedenceMatrix precedence(std::span<const std::string> sentences) const;

    /// One logistic-loss gradient step on a single example.
    void update(std::span<const std::uint32_t> features, double label, double learning_rate);

    friend bool operator==(const PairwiseModel&, const PairwiseModel&) = default;

private:
    double score(std::span<const std::uint32_t> features) const;

    unsigned hash_bits_;
    std::vector<double> weights_;
    double bias_ = 0.0;
};

/// Lower-cased alphanumeric tokens.
std::vector<std::string> tokenize(std::string_view sentence);

/// Trains on every ordered pair (s_i, s_j), i < j, labelled 1, plus its
/// reversal labelled 0, visiting examples in a seeded order each epoch.
/// Throws UsageError on an empty corpus.
PairwiseModel train_pairwise(const Corpus& train, const PairwiseConfig& config);

/// Share of held-out ordered pairs (both directions) classified correctly.
double pairwise_accuracy(const PairwiseModel& model, const Corpus& corpus);

/// Greedy tournament decode: repeatedly emit the remaining slot with the
/// largest sum of positive margins towards the other remaining slots; ties
/// go to the lower slot. Returns 1-based slots in emitted order.
Permutation btsort_decode(const PrecedenceMatrix& margins);

/// Pairwise classifier plus tournament decode.
class BtsortOrderer final : public Orderer {
public:
    explicit BtsortOrderer(std::shared_ptr<const PairwiseModel> model);

    std::string name() const override { return "btsort"; }
    Prediction order(const ShuffledInstance& instance) const override;

    const PairwiseModel& model() const { return *model_; }

private:
    std::shared_ptr<const PairwiseModel> model_;
};

} // namespace orderbench

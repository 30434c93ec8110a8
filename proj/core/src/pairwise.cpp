#include "orderbench/pairwise.hpp"

#include "orderbench/error.hpp"
#include "orderbench/random.hpp"

#include <cctype>
#include <cmath>

namespace orderbench {

std::vector<std::string> tokenize(std::string_view sentence)
{
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : sentence) {
        if (std::isalnum(c) || c >= 0x80) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

namespace {

/// Hashed features of one sentence seen from one side of a pair.
struct SideFeatures {
    std::vector<std::uint32_t> ids;
    std::size_t length = 0;
};

std::uint32_t hash_feature(std::string_view tag, std::string_view token, std::uint32_t mask)
{
    std::string key(tag);
    key += token;
    return static_cast<std::uint32_t>(fnv1a64(key)) & mask;
}

SideFeatures side_features(std::string_view sentence, char side, std::uint32_t mask)
{
    const auto tokens = tokenize(sentence);
    const std::string unigram_tag = std::string(1, side) + ":u:";
    const std::string lead_tag = std::string(1, side) + ":lead:";
    SideFeatures out;
    out.length = tokens.size();
    out.ids.reserve(tokens.size() + 1);
    for (const auto& t : tokens) {
        out.ids.push_back(hash_feature(unigram_tag, t, mask));
    }
    if (!tokens.empty()) {
        out.ids.push_back(hash_feature(lead_tag, tokens.front(), mask));
    }
    return out;
}

std::vector<std::uint32_t> combine(const SideFeatures& first, const SideFeatures& second, std::uint32_t mask)
{
    std::vector<std::uint32_t> ids;
    ids.reserve(first.ids.size() + second.ids.size() + 1);
    ids.insert(ids.end(), first.ids.begin(), first.ids.end());
    ids.insert(ids.end(), second.ids.begin(), second.ids.end());
    const char* sign = first.length < second.length ? "-" : (first.length > second.length ? "+" : "0");
    ids.push_back(hash_feature("len:", sign, mask));
    return ids;
}

double sigmoid(double x)
{
    if (x >= 0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace

PairwiseModel::PairwiseModel(unsigned hash_bits) : hash_bits_(hash_bits)
{
    if (hash_bits < 4 || hash_bits > 28) {
        throw UsageError("hash bits must lie in [4, 28], got " + std::to_string(hash_bits));
    }
    weights_.assign(std::size_t{1} << hash_bits, 0.0);
}

std::vector<std::uint32_t> PairwiseModel::features(std::string_view first, std::string_view second) const
{
    const auto mask = static_cast<std::uint32_t>(weights_.size() - 1);
    return combine(side_features(first, 'a', mask), side_features(second, 'b', mask), mask);
}

double PairwiseModel::score(std::span<const std::uint32_t> features) const
{
    double s = bias_;
    for (auto id : features) {
        s += weights_[id];
    }
    return s;
}

double PairwiseModel::logit(std::string_view first, std::string_view second) const
{
    return score(features(first, second));
}

double PairwiseModel::probability(std::string_view first, std::string_view second) const
{
    return sigmoid(logit(first, second));
}

PrecedenceMatrix PairwiseModel::precedence(std::span<const std::string> sentences) const
{
    const auto mask = static_cast<std::uint32_t>(weights_.size() - 1);
    const std::size_t n = sentences.size();
    std::vector<SideFeatures> a;
    std::vector<SideFeatures> b;
    for (const auto& s : sentences) {
        a.push_back(side_features(s, 'a', mask));
        b.push_back(side_features(s, 'b', mask));
    }
    PrecedenceMatrix margins(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                margins(i, j) = score(combine(a[i], b[j], mask));
            }
        }
    }
    return margins;
}

void PairwiseModel::update(std::span<const std::uint32_t> features, double label, double learning_rate)
{
    const double gradient = sigmoid(score(features)) - label;
    const double step = learning_rate * gradient;
    for (auto id : features) {
        weights_[id] -= step;
    }
    bias_ -= step;
}

PairwiseModel train_pairwise(const Corpus& train, const PairwiseConfig& config)
{
    if (train.empty()) {
        throw UsageError("cannot train a pairwise model on an empty corpus");
    }
    PairwiseModel model(config.hash_bits);
    const auto mask = static_cast<std::uint32_t>((std::size_t{1} << config.hash_bits) - 1);

    // Per-document sentence features, laid out in the training target order.
    std::vector<std::vector<SideFeatures>> first_side;
    std::vector<std::vector<SideFeatures>> second_side;
    struct Example {
        std::uint32_t doc;
        std::uint32_t earlier;
        std::uint32_t later;
    };
    std::vector<Example> examples;
    for (const auto& doc : train.documents) {
        std::vector<std::size_t> target(doc.size());
        for (std::size_t i = 0; i < doc.size(); ++i) {
            target[i] = i;
        }
        if (config.corrupt_targets) {
            const Permutation fake = sample_shuffle(doc.size(), derive_seed(config.seed, doc.id, "corrupt-targets"));
            for (std::size_t i = 0; i < doc.size(); ++i) {
                target[i] = static_cast<std::size_t>(fake.at(i + 1) - 1);
            }
        }
        std::vector<SideFeatures> a;
        std::vector<SideFeatures> b;
        for (auto i : target) {
            a.push_back(side_features(doc.sentences[i], 'a', mask));
            b.push_back(side_features(doc.sentences[i], 'b', mask));
        }
        const auto d = static_cast<std::uint32_t>(first_side.size());
        first_side.push_back(std::move(a));
        second_side.push_back(std::move(b));
        for (std::uint32_t i = 0; i < doc.size(); ++i) {
            for (std::uint32_t j = i + 1; j < doc.size(); ++j) {
                examples.push_back({d, i, j});
            }
        }
    }

    // Each example index k encodes a pair and its direction: even = in order.
    std::vector<std::size_t> visit(examples.size() * 2);
    for (std::size_t k = 0; k < visit.size(); ++k) {
        visit[k] = k;
    }
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Rng rng(derive_seed(config.seed, "epoch-" + std::to_string(epoch), "pairwise-train"));
        for (std::size_t i = visit.size(); i > 1; --i) {
            std::swap(visit[i - 1], visit[rng.below(i)]);
        }
        for (auto k : visit) {
            const Example& ex = examples[k / 2];
            const bool forward = k % 2 == 0;
            const auto first = forward ? ex.earlier : ex.later;
            const auto second = forward ? ex.later : ex.earlier;
            const auto ids = combine(first_side[ex.doc][first], second_side[ex.doc][second], mask);
            model.update(ids, forward ? 1.0 : 0.0, config.learning_rate);
        }
    }
    return model;
}

double pairwise_accuracy(const PairwiseModel& model, const Corpus& corpus)
{
    std::size_t total = 0;
    std::size_t correct = 0;
    for (const auto& doc : corpus.documents) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            for (std::size_t j = i + 1; j < doc.size(); ++j) {
                correct += model.logit(doc.sentences[i], doc.sentences[j]) > 0;
                correct += model.logit(doc.sentences[j], doc.sentences[i]) < 0;
                total += 2;
            }
        }
    }
    return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

Permutation btsort_decode(const PrecedenceMatrix& margins)
{
    const std::size_t n = margins.size();
    std::vector<bool> remaining(n, true);
    std::vector<int> order;
    order.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t best = n;
        double best_score = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!remaining[i]) {
                continue;
            }
            double score = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && remaining[j] && margins(i, j) > 0.0) {
                    score += margins(i, j);
                }
            }
            if (best == n || score > best_score) {
                best = i;
                best_score = score;
            }
        }
        remaining[best] = false;
        order.push_back(static_cast<int>(best + 1));
    }
    return Permutation(std::move(order));
}

BtsortOrderer::BtsortOrderer(std::shared_ptr<const PairwiseModel> model) : model_(std::move(model))
{
    if (!model_) {
        throw UsageError("btsort orderer needs a trained model");
    }
}

Prediction BtsortOrderer::order(const ShuffledInstance& instance) const
{
    return {btsort_decode(model_->precedence(instance.shuffled)), false};
}

} // namespace orderbench

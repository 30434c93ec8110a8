#pragma once

#include "orderbench/permutation.hpp"
#include "orderbench/rational.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>

namespace orderbench {

/// One scored prediction. y_pred and y_gold are position-marker sequences of equal size.
struct InstanceResult {
    std::string instance_id;
    Permutation y_pred;
    Permutation y_gold;
    Rational shuffle_degree; ///< normalised degree of shuffling of the input

    std::size_t n() const { return y_gold.size(); }
};

struct MetricSummary {
    Rational accuracy;
    Rational pmr;
    Rational tau;
    Rational head_acc;
    Rational tail_acc;
    std::size_t n_instances = 0;

    friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

/// Fraction of positions where the predicted marker equals the gold marker.
Rational accuracy(const InstanceResult& r);

/// Fraction of instances predicted exactly. Throws UsageError on an empty list.
Rational pmr(std::span<const InstanceResult> results);

/// 1 - 2 * inversions / C(n, 2); defined as 1 when n = 1.
Rational kendall_tau(const Permutation& predicted, const Permutation& gold);
Rational kendall_tau(const InstanceResult& r);

/// (first-position accuracy, last-position accuracy). Throws UsageError on an empty list.
std::pair<Rational, Rational> head_tail_accuracy(std::span<const InstanceResult> results);

/// Correct / total positions within one bucket.
struct AccuracyBucket {
    std::size_t count = 0;
    std::size_t correct = 0;

    Rational accuracy() const
    {
        return count ? Rational(static_cast<long long>(correct), static_cast<long long>(count)) : Rational(0);
    }

    friend bool operator==(const AccuracyBucket&, const AccuracyBucket&) = default;
};

/// Buckets keyed by a relative quantity rounded to one decimal, stored in tenths.
using TenthsBuckets = std::map<int, AccuracyBucket>;

/// Per-position correctness keyed by i / n.
TenthsBuckets positionwise_accuracy(std::span<const InstanceResult> results);

/// Per-position correctness keyed by the relative displacement of gold
/// sentence i in the shuffled input. Results and instances are paired by
/// index; throws DataError if ids or gold markers disagree.
TenthsBuckets displacement_accuracy(std::span<const InstanceResult> results,
                                    std::span<const ShuffledInstance> instances);

/// Same bucketing, using y_gold as the shuffle (y_gold is Y*, so the two agree).
TenthsBuckets displacement_accuracy(std::span<const InstanceResult> results);

/// Swap distance between prediction and gold, counted over wrong predictions only.
std::map<std::size_t, std::size_t> prediction_displacement_histogram(std::span<const InstanceResult> results);

/// min_swaps of the permutation carrying predicted into gold.
std::size_t prediction_displacement(const Permutation& predicted, const Permutation& gold);

/// Mean over clusters of the share held by the cluster's most common label.
/// Throws DataError on a length mismatch or empty input.
Rational cluster_purity(std::span<const int> assignments, std::span<const int> labels);

/// Acc and tau are unweighted means over instances; PMR, head and tail are
/// count ratios. An empty list yields an all-zero summary.
MetricSummary summarize(std::span<const InstanceResult> results);

} // namespace orderbench

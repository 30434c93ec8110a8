#include "orderbench/metrics.hpp"

#include "orderbench/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace orderbench {

namespace {

void require_pair(const InstanceResult& r)
{
    if (r.y_pred.size() != r.y_gold.size() || r.y_gold.empty()) {
        throw DataError("instance '" + r.instance_id + "': predicted and gold marker sequences differ in size");
    }
}

void require_non_empty(std::span<const InstanceResult> results, const char* what)
{
    if (results.empty()) {
        throw UsageError(std::string(what) + " needs at least one result");
    }
}

Rational ratio(std::size_t num, std::size_t den)
{
    return Rational(static_cast<long long>(num), static_cast<long long>(den));
}

} // namespace

Rational accuracy(const InstanceResult& r)
{
    require_pair(r);
    std::size_t hits = 0;
    for (std::size_t i = 1; i <= r.n(); ++i) {
        hits += r.y_pred.at(i) == r.y_gold.at(i);
    }
    return ratio(hits, r.n());
}

Rational pmr(std::span<const InstanceResult> results)
{
    require_non_empty(results, "pmr");
    std::size_t exact = 0;
    for (const auto& r : results) {
        require_pair(r);
        exact += r.y_pred == r.y_gold;
    }
    return ratio(exact, results.size());
}

Rational kendall_tau(const Permutation& predicted, const Permutation& gold)
{
    const std::size_t n = gold.size();
    if (n < 2) {
        return Rational(1);
    }
    const std::size_t pairs = n * (n - 1) / 2;
    return Rational(1) - ratio(2 * count_inversions(predicted, gold), pairs);
}

Rational kendall_tau(const InstanceResult& r)
{
    require_pair(r);
    return kendall_tau(r.y_pred, r.y_gold);
}

std::pair<Rational, Rational> head_tail_accuracy(std::span<const InstanceResult> results)
{
    require_non_empty(results, "head_tail_accuracy");
    std::size_t head = 0;
    std::size_t tail = 0;
    for (const auto& r : results) {
        require_pair(r);
        head += r.y_pred.at(1) == r.y_gold.at(1);
        tail += r.y_pred.at(r.n()) == r.y_gold.at(r.n());
    }
    return {ratio(head, results.size()), ratio(tail, results.size())};
}

TenthsBuckets positionwise_accuracy(std::span<const InstanceResult> results)
{
    require_non_empty(results, "positionwise_accuracy");
    TenthsBuckets buckets;
    for (const auto& r : results) {
        require_pair(r);
        for (std::size_t i = 1; i <= r.n(); ++i) {
            auto& b = buckets[round_to_tenths(ratio(i, r.n()))];
            ++b.count;
            b.correct += r.y_pred.at(i) == r.y_gold.at(i);
        }
    }
    return buckets;
}

TenthsBuckets displacement_accuracy(std::span<const InstanceResult> results)
{
    TenthsBuckets buckets;
    for (const auto& r : results) {
        require_pair(r);
        const std::size_t n = r.n();
        for (std::size_t i = 1; i <= n; ++i) {
            const auto j = static_cast<std::size_t>(r.y_gold.at(i));
            const std::size_t distance = i > j ? i - j : j - i;
            auto& b = buckets[round_to_tenths(ratio(distance, n))];
            ++b.count;
            b.correct += r.y_pred.at(i) == r.y_gold.at(i);
        }
    }
    return buckets;
}

TenthsBuckets displacement_accuracy(std::span<const InstanceResult> results,
                                    std::span<const ShuffledInstance> instances)
{
    if (results.size() != instances.size()) {
        throw DataError("displacement_accuracy: " + std::to_string(results.size()) + " results paired with " +
                        std::to_string(instances.size()) + " instances");
    }
    TenthsBuckets buckets;
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        const auto& inst = instances[k];
        if (r.instance_id != inst.id || r.y_gold != inst.gold) {
            throw DataError("displacement_accuracy: result '" + r.instance_id + "' is paired with instance '" +
                            inst.id + "'");
        }
        require_pair(r);
        for (std::size_t i = 1; i <= r.n(); ++i) {
            auto& b = buckets[round_to_tenths(relative_displacement(i, inst))];
            ++b.count;
            b.correct += r.y_pred.at(i) == r.y_gold.at(i);
        }
    }
    return buckets;
}

std::size_t prediction_displacement(const Permutation& predicted, const Permutation& gold)
{
    if (predicted.size() != gold.size()) {
        throw DataError("prediction_displacement: size mismatch");
    }
    // where[i] = position in gold of the slot predicted at position i.
    const Permutation gold_inv = gold.inverse();
    std::vector<int> where(predicted.size());
    for (std::size_t i = 1; i <= predicted.size(); ++i) {
        where[i - 1] = gold_inv.at(static_cast<std::size_t>(predicted.at(i)));
    }
    return min_swaps(Permutation(std::move(where)));
}

std::map<std::size_t, std::size_t> prediction_displacement_histogram(std::span<const InstanceResult> results)
{
    std::map<std::size_t, std::size_t> histogram;
    for (const auto& r : results) {
        require_pair(r);
        if (r.y_pred != r.y_gold) {
            ++histogram[prediction_displacement(r.y_pred, r.y_gold)];
        }
    }
    return histogram;
}

Rational cluster_purity(std::span<const int> assignments, std::span<const int> labels)
{
    if (assignments.size() != labels.size()) {
        throw DataError("cluster_purity: " + std::to_string(assignments.size()) + " assignments but " +
                        std::to_string(labels.size()) + " labels");
    }
    if (assignments.empty()) {
        throw DataError("cluster_purity: empty input");
    }
    std::map<int, std::unordered_map<int, std::size_t>> counts;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        ++counts[assignments[i]][labels[i]];
    }
    Rational total(0);
    for (const auto& [cluster, by_label] : counts) {
        std::size_t size = 0;
        std::size_t modal = 0;
        for (const auto& [label, c] : by_label) {
            size += c;
            modal = std::max(modal, c);
        }
        total += ratio(modal, size);
    }
    return total / static_cast<long long>(counts.size());
}

MetricSummary summarize(std::span<const InstanceResult> results)
{
    MetricSummary s;
    s.n_instances = results.size();
    if (results.empty()) {
        return s;
    }
    Rational acc_sum(0);
    Rational tau_sum(0);
    for (const auto& r : results) {
        acc_sum += accuracy(r);
        tau_sum += kendall_tau(r);
    }
    const auto count = static_cast<long long>(results.size());
    s.accuracy = acc_sum / count;
    s.tau = tau_sum / count;
    s.pmr = pmr(results);
    std::tie(s.head_acc, s.tail_acc) = head_tail_accuracy(results);
    return s;
}

} // namespace orderbench

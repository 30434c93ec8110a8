#pragma once

#include "orderbench/codec.hpp"
#include "orderbench/corpus.hpp"
#include "orderbench/metrics.hpp"
#include "orderbench/orderers.hpp"
#include "orderbench/pairwise.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace orderbench {

struct RunConfig {
    std::string corpus_name;
    std::string orderer;
    MarkerMode mode = MarkerMode::sequential();
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_sentences;
    std::size_t repeats = 1; ///< seeded shuffles per document
    std::size_t jobs = 1;    ///< worker threads; never affects results
};

struct InstanceRecord {
    InstanceResult result;
    bool repaired = false;
};

struct InstanceFailure {
    std::string instance_id;
    std::string message;

    friend bool operator==(const InstanceFailure&, const InstanceFailure&) = default;
};

/// Everything measured for one (orderer, corpus) run. Records and failures
/// are sorted by instance id; every aggregate is derived from the records.
struct EvaluationReport {
    RunConfig config;
    MetricSummary summary;
    std::vector<InstanceRecord> instances;
    std::vector<InstanceFailure> failures;
    std::map<std::size_t, MetricSummary> by_length; ///< keyed by N_S
    std::map<int, MetricSummary> by_shuffle;        ///< keyed by shuffle degree, in tenths
    TenthsBuckets by_position;
    TenthsBuckets by_displacement;
    std::map<std::size_t, std::size_t> displacement_histogram;
    std::size_t repairs = 0;

    std::size_t errors() const { return failures.size(); }
    std::size_t total() const { return instances.size() + failures.size(); }
};

/// Document id, suffixed with "#r<k>" when a run uses several shuffles per document.
std::string instance_id(const Document& doc, std::size_t repeat, std::size_t repeats);

/// Truncates, then shuffles each document with a seed keyed by (config.seed, instance id).
std::vector<ShuffledInstance> make_instances(const Corpus& corpus, const RunConfig& config);

/// Runs the orderer over every instance on config.jobs threads and aggregates
/// in instance-id order, so the report does not depend on the thread count.
EvaluationReport evaluate(const Corpus& corpus, const Orderer& orderer, const RunConfig& config);

/// Sorts records and failures by id and derives every aggregate from them.
EvaluationReport assemble_report(RunConfig config, std::vector<InstanceRecord> records,
                                 std::vector<InstanceFailure> failures);

enum class BucketAxis { length, shuffle_degree };

struct BucketRow {
    std::string key;
    std::size_t count = 0;
    Rational accuracy;
    Rational pmr;
    Rational tau;
};

/// Per-bucket Acc/PMR/tau keyed by N_S or by shuffle degree rounded to one decimal.
std::vector<BucketRow> bucket_report(const EvaluationReport& report, BucketAxis axis);

struct ZeroShotCell {
    std::string train;
    std::string eval;
    std::optional<MetricSummary> summary;
    std::string error; ///< set when the training corpus failed to train
};

/// Rows are training corpora, columns evaluation corpora.
struct ZeroShotMatrix {
    std::vector<std::string> train_names;
    std::vector<std::string> eval_names;
    std::vector<ZeroShotCell> cells; ///< row-major

    const ZeroShotCell& at(std::size_t row, std::size_t col) const { return cells.at(row * eval_names.size() + col); }
};

using OrdererTrainer = std::function<std::unique_ptr<Orderer>(const Corpus& train)>;

/// Trainer producing a btsort orderer from a pairwise model.
OrdererTrainer pairwise_trainer(PairwiseConfig config);

/// Trains once per training corpus and evaluates on every evaluation corpus
/// with the settings of base (corpus_name is replaced per column). A
/// training failure fills that row with its error.
ZeroShotMatrix zero_shot(std::span<const Corpus> train, std::span<const Corpus> eval, const OrdererTrainer& trainer,
                         const RunConfig& base);

} // namespace orderbench

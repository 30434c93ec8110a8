#include "orderbench/harness.hpp"

#include "orderbench/error.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace orderbench {

std::string instance_id(const Document& doc, std::size_t repeat, std::size_t repeats)
{
    if (repeats <= 1) {
        return doc.id;
    }
    return doc.id + "#r" + std::to_string(repeat + 1);
}

std::vector<ShuffledInstance> make_instances(const Corpus& corpus, const RunConfig& config)
{
    if (config.repeats == 0) {
        throw UsageError("repeats must be positive");
    }
    std::vector<ShuffledInstance> instances;
    instances.reserve(corpus.size() * config.repeats);
    for (const auto& original : corpus.documents) {
        const Document doc = config.max_sentences ? truncate(original, *config.max_sentences) : original;
        for (std::size_t r = 0; r < config.repeats; ++r) {
            auto id = instance_id(doc, r, config.repeats);
            const auto seed = derive_seed(config.seed, id, "shuffle");
            instances.push_back(shuffle_document(doc, seed, std::move(id)));
        }
    }
    return instances;
}

namespace {

constexpr std::size_t kChunk = 32;

std::vector<Outcome> run_orderer(const Orderer& orderer, std::span<const ShuffledInstance> instances, std::size_t jobs)
{
    std::vector<Outcome> outcomes(instances.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            const std::size_t begin = cursor.fetch_add(kChunk);
            if (begin >= instances.size()) {
                return;
            }
            const std::size_t end = std::min(begin + kChunk, instances.size());
            auto chunk = orderer.order_batch(instances.subspan(begin, end - begin));
            std::move(chunk.begin(), chunk.end(), outcomes.begin() + static_cast<std::ptrdiff_t>(begin));
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, (instances.size() + kChunk - 1) / kChunk));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    return outcomes;
}

MetricSummary summarize_records(const std::vector<const InstanceResult*>& members)
{
    std::vector<InstanceResult> copy;
    copy.reserve(members.size());
    for (const auto* r : members) {
        copy.push_back(*r);
    }
    return summarize(copy);
}

} // namespace

EvaluationReport evaluate(const Corpus& corpus, const Orderer& orderer, const RunConfig& config)
{
    const auto instances = make_instances(corpus, config);
    auto outcomes = run_orderer(orderer, instances, config.jobs);

    std::vector<InstanceRecord> records;
    std::vector<InstanceFailure> failures;
    records.reserve(instances.size());
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const auto& instance = instances[k];
        auto& outcome = outcomes[k];
        if (outcome.prediction && outcome.prediction->y.size() != instance.size()) {
            outcome = Outcome::failed("orderer returned " + std::to_string(outcome.prediction->y.size()) +
                                      " markers for " + std::to_string(instance.size()) + " sentences");
        }
        if (!outcome.prediction) {
            failures.push_back({instance.id, outcome.error});
            continue;
        }
        InstanceRecord record;
        record.result.instance_id = instance.id;
        record.result.y_pred = std::move(outcome.prediction->y);
        record.result.y_gold = instance.gold;
        record.result.shuffle_degree = normalized_shuffle_degree(instance.gold);
        record.repaired = outcome.prediction->repaired;
        records.push_back(std::move(record));
    }
    RunConfig echo = config;
    if (echo.corpus_name.empty()) {
        echo.corpus_name = corpus.name;
    }
    if (echo.orderer.empty()) {
        echo.orderer = orderer.name();
    }
    return assemble_report(std::move(echo), std::move(records), std::move(failures));
}

EvaluationReport assemble_report(RunConfig config, std::vector<InstanceRecord> records,
                                 std::vector<InstanceFailure> failures)
{
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return a.result.instance_id < b.result.instance_id;
    });
    std::sort(failures.begin(), failures.end(), [](const auto& a, const auto& b) {
        return a.instance_id < b.instance_id;
    });

    EvaluationReport report;
    report.config = std::move(config);

    std::vector<InstanceResult> results;
    results.reserve(records.size());
    std::map<std::size_t, std::vector<const InstanceResult*>> length_members;
    std::map<int, std::vector<const InstanceResult*>> shuffle_members;
    for (const auto& record : records) {
        results.push_back(record.result);
        report.repairs += record.repaired;
    }
    for (const auto& r : results) {
        length_members[r.n()].push_back(&r);
        shuffle_members[round_to_tenths(r.shuffle_degree)].push_back(&r);
    }

    report.summary = summarize(results);
    for (const auto& [n, members] : length_members) {
        report.by_length.emplace(n, summarize_records(members));
    }
    for (const auto& [key, members] : shuffle_members) {
        report.by_shuffle.emplace(key, summarize_records(members));
    }
    if (!results.empty()) {
        report.by_position = positionwise_accuracy(results);
    }
    report.by_displacement = displacement_accuracy(results);
    report.displacement_histogram = prediction_displacement_histogram(results);
    report.instances = std::move(records);
    report.failures = std::move(failures);
    return report;
}

std::vector<BucketRow> bucket_report(const EvaluationReport& report, BucketAxis axis)
{
    std::vector<BucketRow> rows;
    auto push = [&rows](std::string key, const MetricSummary& s) {
        rows.push_back({std::move(key), s.n_instances, s.accuracy, s.pmr, s.tau});
    };
    if (axis == BucketAxis::length) {
        for (const auto& [n, s] : report.by_length) {
            push(std::to_string(n), s);
        }
    } else {
        for (const auto& [tenths, s] : report.by_shuffle) {
            push(tenths_label(tenths), s);
        }
    }
    return rows;
}

OrdererTrainer pairwise_trainer(PairwiseConfig config)
{
    return [config](const Corpus& train) -> std::unique_ptr<Orderer> {
        auto model = std::make_shared<const PairwiseModel>(train_pairwise(train, config));
        return std::make_unique<BtsortOrderer>(std::move(model));
    };
}

ZeroShotMatrix zero_shot(std::span<const Corpus> train, std::span<const Corpus> eval, const OrdererTrainer& trainer,
                         const RunConfig& base)
{
    if (train.empty() || eval.empty()) {
        throw UsageError("zero-shot needs at least one training and one evaluation corpus");
    }
    ZeroShotMatrix matrix;
    for (const auto& c : train) {
        matrix.train_names.push_back(c.name);
    }
    for (const auto& c : eval) {
        matrix.eval_names.push_back(c.name);
    }
    for (const auto& train_corpus : train) {
        std::unique_ptr<Orderer> orderer;
        std::string error;
        try {
            orderer = trainer(train_corpus);
        } catch (const std::exception& e) {
            error = e.what();
        }
        for (const auto& eval_corpus : eval) {
            ZeroShotCell cell{train_corpus.name, eval_corpus.name, std::nullopt, error};
            if (orderer) {
                RunConfig config = base;
                config.corpus_name = eval_corpus.name;
                config.orderer = orderer->name();
                cell.summary = evaluate(eval_corpus, *orderer, config).summary;
            }
            matrix.cells.push_back(std::move(cell));
        }
    }
    return matrix;
}

} // namespace orderbench

#include "cli/commands.hpp"

#include "cli/mock_endpoint.hpp"

#include <orderbench/error.hpp>
#include <orderbench/external.hpp>
#include <orderbench/harness.hpp>
#include <orderbench/report_io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

namespace orderbench::cli {

namespace {

namespace fs = std::filesystem;

std::string corpus_name_from(const std::string& path)
{
    return fs::path(path).stem().string();
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) {
            out.push_back(item);
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::string fmt_percent(const Rational& r)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", to_double(r) * 100.0);
    return buf;
}

std::string fmt_tau(const Rational& r)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", to_double(r));
    return buf;
}

struct TrainerFlags {
    std::size_t epochs = 5;
    double learning_rate = 0.1;
    unsigned hash_bits = 18;
    bool corrupt_targets = false;

    void add_to(CLI::App& app)
    {
        app.add_option("--epochs", epochs, "Pairwise trainer epochs")->capture_default_str();
        app.add_option("--lr", learning_rate, "Pairwise trainer learning rate")->capture_default_str();
        app.add_option("--hash-bits", hash_bits, "Feature hashing dimension (log2)")->capture_default_str();
        app.add_flag("--corrupt-targets", corrupt_targets, "Train on random target orders (shuffled-output ablation)");
    }

    PairwiseConfig config(std::uint64_t seed) const
    {
        return {epochs, learning_rate, seed, hash_bits, corrupt_targets};
    }
};

struct EvaluateFlags {
    std::string corpus;
    std::string orderer = "random";
    std::string mode = "seq";
    std::uint64_t seed = 0;
    std::size_t max_sentences = 0;
    std::size_t jobs = 1;
    std::size_t repeats = 1;
    std::string train;
    std::string out;
    std::string format = "json";
    TrainerFlags trainer;
};

std::unique_ptr<Orderer> make_orderer(const EvaluateFlags& f, const MarkerMode& mode, std::ostream& out)
{
    if (f.orderer == "identity") {
        return std::make_unique<IdentityOrderer>();
    }
    if (f.orderer == "random") {
        return std::make_unique<RandomOrderer>(f.seed);
    }
    if (f.orderer == "gold") {
        return std::make_unique<GoldOrderer>();
    }
    if (f.orderer == "btsort") {
        if (f.train.empty()) {
            throw UsageError("--orderer btsort needs --train <corpus.jsonl>");
        }
        const Corpus train = load_corpus(f.train, corpus_name_from(f.train));
        auto model = std::make_shared<const PairwiseModel>(train_pairwise(train, f.trainer.config(f.seed)));
        out << "trained pairwise model on " << train.size() << " documents\n";
        return std::make_unique<BtsortOrderer>(std::move(model));
    }
    constexpr std::string_view external = "external:";
    if (f.orderer.starts_with(external)) {
        ExternalConfig config;
        config.uri = f.orderer.substr(external.size());
        config.mode = mode;
        config.timeout = timeout_from_env();
        return std::make_unique<ExternalOrderer>(std::move(config));
    }
    throw UsageError("unknown orderer '" + f.orderer + "' (expected identity, random, gold, btsort or external:<uri>)");
}

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out)
{
    const MarkerMode mode = MarkerMode::parse(f.mode, f.seed);
    const Corpus corpus = load_corpus(f.corpus, corpus_name_from(f.corpus));
    auto orderer = make_orderer(f, mode, out);

    RunConfig config;
    config.corpus_name = corpus.name;
    config.orderer = f.orderer;
    config.mode = mode;
    config.seed = f.seed;
    if (f.max_sentences > 0) {
        config.max_sentences = f.max_sentences;
    }
    config.repeats = f.repeats;
    config.jobs = f.jobs;

    const EvaluationReport report = evaluate(corpus, *orderer, config);
    if (!f.out.empty()) {
        write_report(report, f.out, parse_report_format(f.format));
    }
    const auto& s = report.summary;
    out << f.orderer << " on " << corpus.name << ": Acc " << fmt_percent(s.accuracy) << "  PMR "
        << fmt_percent(s.pmr) << "  tau " << fmt_tau(s.tau) << "  (" << s.n_instances << " scored, "
        << report.errors() << " errors, " << report.repairs << " repaired)\n";
    if (!f.out.empty()) {
        out << "report written to " << f.out << "\n";
    }
    if (report.errors() > 0) {
        out << "first error: " << report.failures.front().instance_id << ": " << report.failures.front().message
            << "\n";
        return kEndpoint;
    }
    return kOk;
}

struct ZeroShotFlags {
    std::string train;
    std::string eval;
    std::string split;
    std::uint64_t seed = 0;
    std::size_t max_sentences = 0;
    std::size_t jobs = 1;
    std::string out;
    std::string format = "json";
    TrainerFlags trainer;
};

int cmd_zero_shot(const ZeroShotFlags& f, std::ostream& out)
{
    const auto train_paths = split_list(f.train);
    const auto eval_paths = split_list(f.eval);
    if (train_paths.empty() || eval_paths.empty()) {
        throw UsageError("--train and --eval each need at least one corpus file");
    }
    std::vector<Corpus> train;
    std::vector<Corpus> eval;
    for (const auto& p : train_paths) {
        Corpus c = load_corpus(p, corpus_name_from(p));
        if (!f.split.empty()) {
            auto parts = split(c, SplitSpec::from_weights(f.split, f.seed));
            parts.train.name = c.name;
            c = std::move(parts.train);
        }
        train.push_back(std::move(c));
    }
    for (const auto& p : eval_paths) {
        Corpus c = load_corpus(p, corpus_name_from(p));
        if (!f.split.empty()) {
            auto parts = split(c, SplitSpec::from_weights(f.split, f.seed));
            parts.test.name = c.name;
            c = std::move(parts.test);
        }
        eval.push_back(std::move(c));
    }
    RunConfig base;
    base.seed = f.seed;
    if (f.max_sentences > 0) {
        base.max_sentences = f.max_sentences;
    }
    base.jobs = f.jobs;
    const auto matrix = zero_shot(train, eval, pairwise_trainer(f.trainer.config(f.seed)), base);
    if (!f.out.empty()) {
        write_report(matrix, f.out, parse_report_format(f.format));
    }
    out << render_matrix(matrix, ReportFormat::markdown);
    if (!f.out.empty()) {
        out << "matrix written to " << f.out << "\n";
    }
    return kOk;
}

} // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"order_bench: sentence-ordering benchmark harness"};
    app.require_subcommand(1);

    // gen-synthetic
    std::size_t gen_docs = 100;
    std::size_t gen_sentences = 5;
    std::uint64_t gen_seed = 0;
    int gen_scheme = 0;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen-synthetic", "Generate a synthetic corpus with positional cue words");
    gen->add_option("--docs", gen_docs, "Number of documents")->capture_default_str();
    gen->add_option("--sentences", gen_sentences, "Sentences per document")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--scheme", gen_scheme, "Cue vocabulary scheme (different schemes share no cue words)")
        ->capture_default_str();
    gen->add_option("--out", gen_out, "Output corpus file (JSON lines)")->required();

    // split
    std::string split_corpus;
    std::string split_ratios = "80:10:10";
    std::uint64_t split_seed = 0;
    std::string split_prefix;
    auto* split_cmd = app.add_subcommand("split", "Split a corpus into train/dev/test files");
    split_cmd->add_option("--corpus", split_corpus, "Input corpus file")->required();
    split_cmd->add_option("--ratios", split_ratios, "train:dev:test weights")->capture_default_str();
    split_cmd->add_option("--seed", split_seed, "Random seed")->capture_default_str();
    split_cmd->add_option("--out", split_prefix, "Output prefix; writes <prefix>.train.jsonl etc.")->required();

    // encode
    std::string enc_corpus;
    std::string enc_mode = "seq";
    std::uint64_t enc_seed = 0;
    std::size_t enc_max = 0;
    std::string enc_out;
    auto* enc = app.add_subcommand("encode", "Shuffle and encode a corpus in the text-to-marker input format");
    enc->add_option("--corpus", enc_corpus, "Input corpus file")->required();
    enc->add_option("--mode", enc_mode, "Marker mode: seq, random or none")->capture_default_str();
    enc->add_option("--seed", enc_seed, "Seed for shuffles and random markers")->capture_default_str();
    enc->add_option("--max-sentences", enc_max, "Truncate documents first (0 = keep all)");
    enc->add_option("--out", enc_out, "Write JSON lines {id,text,n,markers,target} instead of printing text");

    // evaluate
    EvaluateFlags ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate an orderer on a corpus");
    eval_cmd->add_option("--corpus", ev.corpus, "Evaluation corpus file")->required();
    eval_cmd->add_option("--orderer", ev.orderer, "identity | random | gold | btsort | external:<uri>")
        ->capture_default_str();
    eval_cmd->add_option("--mode", ev.mode, "Marker mode for external orderers: seq, random or none")
        ->capture_default_str();
    eval_cmd->add_option("--seed", ev.seed, "Global seed")->capture_default_str();
    eval_cmd->add_option("--max-sentences", ev.max_sentences, "Truncate documents first (0 = keep all)");
    eval_cmd->add_option("--jobs", ev.jobs, "Worker threads")->capture_default_str();
    eval_cmd->add_option("--repeats", ev.repeats, "Seeded shuffles per document")->capture_default_str();
    eval_cmd->add_option("--train", ev.train, "Training corpus for --orderer btsort");
    eval_cmd->add_option("--out", ev.out, "Report file");
    eval_cmd->add_option("--format", ev.format, "json, csv or markdown")->capture_default_str();
    ev.trainer.add_to(*eval_cmd);

    // zero-shot
    ZeroShotFlags zs;
    auto* zs_cmd = app.add_subcommand("zero-shot", "Train on each corpus and evaluate on every other");
    zs_cmd->add_option("--train", zs.train, "Comma-separated training corpus files")->required();
    zs_cmd->add_option("--eval", zs.eval, "Comma-separated evaluation corpus files")->required();
    zs_cmd->add_option("--split", zs.split, "Split each file (e.g. 80:10:10): train on train, evaluate on test");
    zs_cmd->add_option("--seed", zs.seed, "Global seed")->capture_default_str();
    zs_cmd->add_option("--max-sentences", zs.max_sentences, "Truncate documents first (0 = keep all)");
    zs_cmd->add_option("--jobs", zs.jobs, "Worker threads")->capture_default_str();
    zs_cmd->add_option("--out", zs.out, "Matrix file");
    zs_cmd->add_option("--format", zs.format, "json, csv or markdown")->capture_default_str();
    zs.trainer.add_to(*zs_cmd);

    // serve-mock
    std::string mock_corpus;
    std::string mock_mode = "gold";
    std::uint64_t mock_seed = 0;
    int mock_port = -1;
    std::string mock_name = "mock";
    auto* mock = app.add_subcommand("serve-mock", "Serve a mock external orderer (stdio unless --listen)");
    mock->add_option("--corpus", mock_corpus, "Gold corpus the mock answers from")->required();
    mock->add_option("--mode", mock_mode, "gold | noisy:<p> | invalid")->capture_default_str();
    mock->add_option("--seed", mock_seed, "Seed for noisy/invalid replies")->capture_default_str();
    mock->add_option("--listen", mock_port, "Serve TCP on 127.0.0.1:<port> (0 = any free port)");
    mock->add_option("--name", mock_name, "Name announced in the handshake")->capture_default_str();

    // report
    std::string rep_in;
    std::string rep_format = "markdown";
    std::string rep_out;
    auto* rep = app.add_subcommand("report", "Render a JSON report or zero-shot matrix as csv or markdown");
    rep->add_option("--in", rep_in, "JSON report or matrix")->required();
    rep->add_option("--format", rep_format, "json, csv or markdown")->capture_default_str();
    rep->add_option("--out", rep_out, "Output file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) {
            const Corpus corpus = generate_synthetic(gen_docs, gen_sentences, gen_seed, gen_scheme);
            save_corpus(corpus, gen_out);
            out << "wrote " << corpus.size() << " documents to " << gen_out << "\n";
            return kOk;
        }
        if (*split_cmd) {
            const Corpus corpus = load_corpus(split_corpus, corpus_name_from(split_corpus));
            const auto parts = split(corpus, SplitSpec::from_weights(split_ratios, split_seed));
            save_corpus(parts.train, split_prefix + ".train.jsonl");
            save_corpus(parts.dev, split_prefix + ".dev.jsonl");
            save_corpus(parts.test, split_prefix + ".test.jsonl");
            out << "train " << parts.train.size() << ", dev " << parts.dev.size() << ", test " << parts.test.size()
                << " written with prefix " << split_prefix << "\n";
            return kOk;
        }
        if (*enc) {
            const Corpus corpus = load_corpus(enc_corpus, corpus_name_from(enc_corpus));
            const MarkerMode mode = MarkerMode::parse(enc_mode, enc_seed);
            RunConfig config;
            config.seed = enc_seed;
            if (enc_max > 0) {
                config.max_sentences = enc_max;
            }
            const auto instances = make_instances(corpus, config);
            std::string jsonl;
            for (const auto& instance : instances) {
                const MarkedInput input = encode_input(instance, mode);
                if (enc_out.empty()) {
                    out << input.text << "\n";
                    continue;
                }
                nlohmann::ordered_json j;
                j["id"] = instance.id;
                j["text"] = input.text;
                j["n"] = instance.size();
                j["markers"] = input.marker_of_slot;
                j["target"] = gold_marker_text(instance, input);
                jsonl += j.dump() + "\n";
            }
            if (!enc_out.empty()) {
                write_text_file(enc_out, jsonl);
                out << "encoded " << instances.size() << " instances to " << enc_out << "\n";
            }
            return kOk;
        }
        if (*eval_cmd) {
            return cmd_evaluate(ev, out);
        }
        if (*zs_cmd) {
            return cmd_zero_shot(zs, out);
        }
        if (*mock) {
            MockEndpoint endpoint(load_corpus(mock_corpus, corpus_name_from(mock_corpus)),
                                  MockBehaviour::parse(mock_mode), mock_seed, mock_name);
            if (mock_port < 0) {
                auto channel = stdio_channel();
                endpoint.serve(*channel);
                return kOk;
            }
            if (mock_port > 65535) {
                throw UsageError("--listen port must be in 0..65535");
            }
            TcpListener listener(static_cast<std::uint16_t>(mock_port));
            err << "serving " << mock_mode << " mock on 127.0.0.1:" << listener.port() << std::endl;
            std::vector<std::jthread> sessions;
            while (true) {
                std::shared_ptr<LineChannel> channel = listener.accept();
                sessions.emplace_back([&endpoint, channel] { endpoint.serve(*channel); });
            }
        }
        if (*rep) {
            const std::string text = read_text_file(rep_in);
            const auto format = parse_report_format(rep_format);
            const auto parsed = nlohmann::json::parse(text, nullptr, false);
            const bool is_matrix = parsed.is_object() && parsed.value("schema", "") == kMatrixSchema;
            const std::string rendered = is_matrix ? render_matrix(parse_matrix_json(text), format)
                                                   : render_report(parse_report_json(text), format);
            if (rep_out.empty()) {
                out << rendered;
            } else {
                write_text_file(rep_out, rendered);
                out << "wrote " << rep_out << "\n";
            }
            return kOk;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kData;
    } catch (const ProtocolError& e) {
        err << "endpoint error: " << e.what() << "\n";
        return kEndpoint;
    }
    return kUsage;
}

} // namespace orderbench::cli

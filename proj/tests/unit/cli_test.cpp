#include "cli/commands.hpp"

#include <orderbench/corpus.hpp>
#include <orderbench/report_io.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace orderbench {
namespace {

namespace fs = std::filesystem;

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "order_bench");
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Runs the installed binary through the shell and returns its exit status.
int shell(const std::string& command)
{
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("orderbench-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string synthetic(const std::string& name, int docs, int sentences, int seed = 1)
    {
        const auto p = path(name);
        const auto r = cli({"gen-synthetic", "--docs", std::to_string(docs), "--sentences", std::to_string(sentences),
                            "--seed", std::to_string(seed), "--out", p});
        EXPECT_EQ(r.code, 0) << r.err;
        return p;
    }

    fs::path dir_;
};

TEST_F(CliTest, UsageErrors)
{
    EXPECT_EQ(cli({}).code, 1);
    EXPECT_EQ(cli({"frobnicate"}).code, 1);
    EXPECT_EQ(cli({"evaluate"}).code, 1);
    EXPECT_EQ(cli({"--help"}).code, 0);
    const auto corpus = synthetic("c.jsonl", 5, 3);
    EXPECT_EQ(cli({"evaluate", "--corpus", corpus, "--orderer", "oracle-of-delphi"}).code, 1);
    EXPECT_EQ(cli({"evaluate", "--corpus", corpus, "--orderer", "btsort"}).code, 1);
    EXPECT_EQ(cli({"encode", "--corpus", corpus, "--mode", "roman"}).code, 1);
    EXPECT_EQ(cli({"evaluate", "--corpus", corpus, "--format", "yaml", "--out", path("r")}).code, 1);
}

TEST_F(CliTest, DataErrors)
{
    EXPECT_EQ(cli({"evaluate", "--corpus", path("missing.jsonl")}).code, 2);
    std::ofstream(path("bad.jsonl")) << "{\"id\":\"a\",\"sentences\":[\"x\"]}\nnot json\n";
    const auto r = cli({"evaluate", "--corpus", path("bad.jsonl")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(":2"), std::string::npos) << r.err;
}

TEST_F(CliTest, GenerateAndSplit)
{
    const auto corpus = synthetic("s.jsonl", 50, 4, 7);
    const auto loaded = load_corpus(corpus, "s");
    EXPECT_EQ(loaded.size(), 50u);
    EXPECT_EQ(loaded.documents[0].size(), 4u);
    const auto r = cli({"split", "--corpus", corpus, "--ratios", "8:1:1", "--out", path("parts")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(load_corpus(path("parts.train.jsonl"), "t").size(), 40u);
    EXPECT_EQ(load_corpus(path("parts.dev.jsonl"), "d").size(), 5u);
    EXPECT_EQ(load_corpus(path("parts.test.jsonl"), "t").size(), 5u);
}

TEST_F(CliTest, EncodeWritesTargets)
{
    const auto corpus = synthetic("e.jsonl", 6, 5);
    const auto r = cli({"encode", "--corpus", corpus, "--mode", "random", "--seed", "3", "--out", path("enc.jsonl")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path("enc.jsonl"));
    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j.at("n"), 5);
        EXPECT_EQ(j.at("markers").size(), 5u);
        EXPECT_TRUE(j.at("text").get<std::string>().starts_with("[shuffled] <S"));
        ++count;
    }
    EXPECT_EQ(count, 6u);

    const auto printed = cli({"encode", "--corpus", corpus, "--mode", "none"});
    EXPECT_EQ(std::count(printed.out.begin(), printed.out.end(), '\n'), 6);
    EXPECT_EQ(printed.out.find("<S"), std::string::npos);
}

TEST_F(CliTest, EvaluateBaselinesAndFormats)
{
    const auto corpus = synthetic("ev.jsonl", 40, 5);
    auto r = cli({"evaluate", "--corpus", corpus, "--orderer", "gold", "--out", path("gold.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = parse_report_json(read_text_file(path("gold.json")));
    EXPECT_EQ(report.summary.pmr, 1);
    EXPECT_EQ(report.summary.n_instances, 40u);

    r = cli({"evaluate", "--corpus", corpus, "--orderer", "random", "--repeats", "2", "--format", "csv", "--out",
             path("random.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(read_text_file(path("random.csv")).starts_with("axis,key,count"));

    r = cli({"report", "--in", path("gold.json"), "--format", "markdown"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("| gold | 100.00 |"), std::string::npos);
}

TEST_F(CliTest, EvaluateBtsort)
{
    const auto train = synthetic("train.jsonl", 200, 5, 1);
    const auto test = synthetic("test.jsonl", 40, 5, 2);
    const auto r = cli({"evaluate", "--corpus", test, "--orderer", "btsort", "--train", train, "--out", path("b.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GE(to_double(parse_report_json(read_text_file(path("b.json"))).summary.tau), 0.9);
}

TEST_F(CliTest, JobsDoNotChangeReport)
{
    const auto corpus = synthetic("j.jsonl", 120, 6);
    ASSERT_EQ(cli({"evaluate", "--corpus", corpus, "--orderer", "random", "--jobs", "1", "--out", path("j1.json")}).code,
              0);
    ASSERT_EQ(cli({"evaluate", "--corpus", corpus, "--orderer", "random", "--jobs", "6", "--out", path("j6.json")}).code,
              0);
    EXPECT_EQ(read_text_file(path("j1.json")), read_text_file(path("j6.json")));
}

TEST_F(CliTest, ExternalEndpointOverStdio)
{
    const auto corpus = synthetic("x.jsonl", 30, 5);
    const std::string mock = std::string("stdio:") + ORDER_BENCH_CLI + " serve-mock --corpus " + corpus;
    auto r = cli({"evaluate", "--corpus", corpus, "--orderer", "external:" + mock, "--mode", "random", "--jobs", "2",
                  "--out", path("ext.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(parse_report_json(read_text_file(path("ext.json"))).summary.pmr, 1);

    r = cli({"evaluate", "--corpus", corpus, "--orderer", "external:tcp://127.0.0.1:1", "--out", path("down.json")});
    EXPECT_EQ(r.code, 3);
    const auto down = parse_report_json(read_text_file(path("down.json")));
    EXPECT_EQ(down.errors(), 30u);
    EXPECT_EQ(down.summary.n_instances, 0u);
}

TEST_F(CliTest, ZeroShotMatrix)
{
    const auto a = synthetic("a.jsonl", 60, 4, 1);
    const auto b = synthetic("b.jsonl", 60, 4, 2);
    const auto r = cli({"zero-shot", "--train", a + "," + b, "--eval", a + "," + b, "--split", "8:1:1", "--out",
                        path("m.json"), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("| Trained ↓ / Evaluated → | a | b |"), std::string::npos) << r.out;
    const auto matrix = parse_matrix_json(read_text_file(path("m.json")));
    EXPECT_EQ(matrix.cells.size(), 4u);
    const auto rendered = cli({"report", "--in", path("m.json"), "--format", "csv"});
    ASSERT_EQ(rendered.code, 0) << rendered.err;
    EXPECT_TRUE(rendered.out.starts_with("train,eval,"));
}

TEST_F(CliTest, BinaryExitCodes)
{
    const std::string bin = ORDER_BENCH_CLI;
    EXPECT_EQ(shell(bin + " > /dev/null 2>&1"), 1);
    EXPECT_EQ(shell(bin + " evaluate --corpus " + path("none.jsonl") + " > /dev/null 2>&1"), 2);
    const auto corpus = synthetic("bin.jsonl", 5, 3);
    EXPECT_EQ(shell(bin + " evaluate --corpus " + corpus + " --orderer identity > /dev/null 2>&1"), 0);
    EXPECT_EQ(shell(bin + " evaluate --corpus " + corpus + " --orderer external:stdio:false > /dev/null 2>&1"), 3);
}

} // namespace
} // namespace orderbench

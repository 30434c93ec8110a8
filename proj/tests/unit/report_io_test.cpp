#include <orderbench/error.hpp>
#include <orderbench/report_io.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <sstream>

namespace orderbench {
namespace {

EvaluationReport sample_report()
{
    auto corpus = generate_synthetic(40, 5, 1);
    auto four = generate_synthetic(20, 4, 2);
    for (auto doc : four.documents) {
        doc.id = "four-" + doc.id;
        corpus.documents.push_back(std::move(doc));
    }
    RunConfig config;
    config.seed = 3;
    config.mode = MarkerMode::random(17);
    return evaluate(corpus, RandomOrderer(4), config);
}

std::size_t count_lines(const std::string& text)
{
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(ReportFormat, Parse)
{
    EXPECT_EQ(parse_report_format("json"), ReportFormat::json);
    EXPECT_EQ(parse_report_format("csv"), ReportFormat::csv);
    EXPECT_EQ(parse_report_format("md"), ReportFormat::markdown);
    EXPECT_THROW(parse_report_format("xml"), UsageError);
}

TEST(ReportJson, KeysInCanonicalOrder)
{
    const auto text = render_report(sample_report(), ReportFormat::json);
    const auto j = nlohmann::ordered_json::parse(text);
    std::vector<std::string> keys;
    for (const auto& [key, value] : j.items()) {
        keys.push_back(key);
    }
    const std::vector<std::string> expected{"schema",          "config",         "summary",
                                            "buckets_length",  "buckets_shuffle", "buckets_position",
                                            "buckets_displacement", "displacement_histogram", "errors",
                                            "repairs",         "validity_rate",  "failures",
                                            "instances"};
    EXPECT_EQ(keys, expected);
    EXPECT_EQ(j.at("schema"), "order-bench-report/1");
    EXPECT_EQ(j.at("config").at("mode"), "random");
    EXPECT_EQ(j.at("config").at("mode_seed"), 17);
    EXPECT_FALSE(j.at("config").contains("jobs"));
    EXPECT_EQ(j.at("summary").at("n_instances"), 60);
    EXPECT_EQ(text.back(), '\n');
}

TEST(ReportJson, RoundTripPreservesExactValues)
{
    const auto report = sample_report();
    const auto text = render_report(report, ReportFormat::json);
    const auto back = parse_report_json(text);
    EXPECT_EQ(back.summary, report.summary);
    EXPECT_EQ(back.by_position, report.by_position);
    EXPECT_EQ(back.by_displacement, report.by_displacement);
    EXPECT_EQ(back.displacement_histogram, report.displacement_histogram);
    EXPECT_EQ(back.config.mode, report.config.mode);
    EXPECT_EQ(back.config.seed, report.config.seed);
    EXPECT_EQ(render_report(back, ReportFormat::json), text);
}

TEST(ReportJson, RejectsTamperedSummary)
{
    auto j = nlohmann::ordered_json::parse(render_report(sample_report(), ReportFormat::json));
    j["summary"]["exact"]["pmr"] = "1/2";
    EXPECT_THROW(parse_report_json(j.dump()), DataError);
    EXPECT_THROW(parse_report_json("{"), DataError);
    EXPECT_THROW(parse_report_json(R"({"schema":"something-else"})"), DataError);
    EXPECT_THROW(parse_report_json(R"({"schema":"order-bench-report/1"})"), DataError);
}

TEST(ReportCsv, OneRowPerBucket)
{
    const auto report = sample_report();
    const auto csv = render_report(report, ReportFormat::csv);
    const std::size_t buckets = report.by_length.size() + report.by_shuffle.size() + report.by_position.size() +
                                report.by_displacement.size() + report.displacement_histogram.size();
    EXPECT_EQ(count_lines(csv), buckets + 1);
    EXPECT_TRUE(csv.starts_with("axis,key,count,accuracy,pmr,tau\n"));
    EXPECT_NE(csv.find("\nlength,4,20,"), std::string::npos);
    EXPECT_NE(csv.find("\nlength,5,40,"), std::string::npos);
}

TEST(ReportMarkdown, SummaryTable)
{
    const auto report = evaluate(generate_synthetic(10, 3, 1), GoldOrderer(), {});
    const auto md = render_report(report, ReportFormat::markdown);
    EXPECT_NE(md.find("| gold | 100.00 | 100.00 | 1.00 | 100.00 | 100.00 | 10 | 0 | 0 |"), std::string::npos) << md;
    EXPECT_NE(md.find("### By number of sentences"), std::string::npos);
}

ZeroShotMatrix sample_matrix()
{
    const std::vector<Corpus> corpora{generate_synthetic(30, 4, 1), generate_synthetic(30, 4, 2, 1),
                                      generate_synthetic(30, 4, 3, 2)};
    return zero_shot(corpora, corpora, pairwise_trainer({.epochs = 1, .hash_bits = 12}), {});
}

TEST(MatrixMarkdown, ThreeByThree)
{
    const auto matrix = sample_matrix();
    const auto md = render_matrix(matrix, ReportFormat::markdown);
    std::istringstream lines(md);
    std::string line;
    std::vector<std::string> table;
    while (std::getline(lines, line) && !line.empty()) {
        table.push_back(line);
    }
    ASSERT_EQ(table.size(), 5u);
    EXPECT_TRUE(table[0].starts_with("| Trained ↓ / Evaluated → |"));
    for (const auto& row : table) {
        EXPECT_EQ(std::count(row.begin(), row.end(), '|'), 5);
    }
    EXPECT_TRUE(table[2].starts_with("| synthetic-c0-s1 |"));
    EXPECT_EQ(std::count(table[3].begin(), table[3].end(), '/'), 6);
}

TEST(MatrixJson, RoundTrip)
{
    const auto matrix = sample_matrix();
    const auto text = render_matrix(matrix, ReportFormat::json);
    EXPECT_EQ(nlohmann::json::parse(text).at("schema"), "order-bench-zeroshot/1");
    const auto back = parse_matrix_json(text);
    EXPECT_EQ(back.train_names, matrix.train_names);
    EXPECT_EQ(back.eval_names, matrix.eval_names);
    for (std::size_t k = 0; k < matrix.cells.size(); ++k) {
        EXPECT_EQ(back.cells[k].summary, matrix.cells[k].summary);
    }
    EXPECT_EQ(render_matrix(back, ReportFormat::json), text);
    EXPECT_EQ(count_lines(render_matrix(matrix, ReportFormat::csv)), 10u);
}

TEST(ReportFiles, WriteAndRead)
{
    const auto path = std::filesystem::temp_directory_path() / "orderbench-report-test.json";
    const auto report = sample_report();
    write_report(report, path, ReportFormat::json);
    EXPECT_EQ(read_text_file(path), render_report(report, ReportFormat::json));
    std::filesystem::remove(path);
    EXPECT_THROW(read_text_file(path), DataError);
    EXPECT_THROW(write_text_file("/nonexistent-dir/x.json", "x"), DataError);
}

} // namespace
} // namespace orderbench

#include "orderbench/report_io.hpp"

#include "orderbench/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orderbench {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view name)
{
    if (name == "json") {
        return ReportFormat::json;
    }
    if (name == "csv") {
        return ReportFormat::csv;
    }
    if (name == "markdown" || name == "md") {
        return ReportFormat::markdown;
    }
    throw UsageError("unknown report format '" + std::string(name) + "' (expected json, csv or markdown)");
}

namespace {

// ---- JSON -----------------------------------------------------------------

ordered_json config_to_json(const RunConfig& c)
{
    ordered_json j;
    j["corpus"] = c.corpus_name;
    j["orderer"] = c.orderer;
    j["mode"] = c.mode.name();
    if (c.mode.kind == MarkerMode::Kind::random) {
        j["mode_seed"] = c.mode.seed;
    }
    j["seed"] = c.seed;
    j["max_sentences"] = c.max_sentences ? ordered_json(*c.max_sentences) : ordered_json(nullptr);
    j["repeats"] = c.repeats;
    return j;
}

RunConfig config_from_json(const json& j)
{
    RunConfig c;
    c.corpus_name = j.at("corpus").get<std::string>();
    c.orderer = j.at("orderer").get<std::string>();
    c.mode = MarkerMode::parse(j.at("mode").get<std::string>(), j.value("mode_seed", std::uint64_t{0}));
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("max_sentences").is_null()) {
        c.max_sentences = j.at("max_sentences").get<std::size_t>();
    }
    c.repeats = j.at("repeats").get<std::size_t>();
    return c;
}

ordered_json summary_to_json(const MetricSummary& s)
{
    ordered_json j;
    j["n_instances"] = s.n_instances;
    j["accuracy"] = to_double(s.accuracy);
    j["pmr"] = to_double(s.pmr);
    j["tau"] = to_double(s.tau);
    j["head_acc"] = to_double(s.head_acc);
    j["tail_acc"] = to_double(s.tail_acc);
    ordered_json exact;
    exact["accuracy"] = to_string(s.accuracy);
    exact["pmr"] = to_string(s.pmr);
    exact["tau"] = to_string(s.tau);
    exact["head_acc"] = to_string(s.head_acc);
    exact["tail_acc"] = to_string(s.tail_acc);
    j["exact"] = std::move(exact);
    return j;
}

MetricSummary summary_from_json(const json& j)
{
    MetricSummary s;
    s.n_instances = j.at("n_instances").get<std::size_t>();
    const auto& exact = j.at("exact");
    s.accuracy = parse_rational(exact.at("accuracy").get<std::string>());
    s.pmr = parse_rational(exact.at("pmr").get<std::string>());
    s.tau = parse_rational(exact.at("tau").get<std::string>());
    s.head_acc = parse_rational(exact.at("head_acc").get<std::string>());
    s.tail_acc = parse_rational(exact.at("tail_acc").get<std::string>());
    return s;
}

ordered_json summary_bucket_json(std::string key, const MetricSummary& s)
{
    ordered_json j;
    j["key"] = std::move(key);
    j["count"] = s.n_instances;
    j["accuracy"] = to_double(s.accuracy);
    j["pmr"] = to_double(s.pmr);
    j["tau"] = to_double(s.tau);
    return j;
}

ordered_json accuracy_buckets_json(const TenthsBuckets& buckets)
{
    ordered_json out = ordered_json::array();
    for (const auto& [tenths, b] : buckets) {
        ordered_json j;
        j["key"] = tenths_label(tenths);
        j["count"] = b.count;
        j["correct"] = b.correct;
        j["accuracy"] = to_double(b.accuracy());
        out.push_back(std::move(j));
    }
    return out;
}

ordered_json report_to_json(const EvaluationReport& r)
{
    ordered_json j;
    j["schema"] = kReportSchema;
    j["config"] = config_to_json(r.config);
    j["summary"] = summary_to_json(r.summary);

    ordered_json length = ordered_json::array();
    for (const auto& [n, s] : r.by_length) {
        length.push_back(summary_bucket_json(std::to_string(n), s));
    }
    j["buckets_length"] = std::move(length);
    ordered_json shuffle = ordered_json::array();
    for (const auto& [tenths, s] : r.by_shuffle) {
        shuffle.push_back(summary_bucket_json(tenths_label(tenths), s));
    }
    j["buckets_shuffle"] = std::move(shuffle);
    j["buckets_position"] = accuracy_buckets_json(r.by_position);
    j["buckets_displacement"] = accuracy_buckets_json(r.by_displacement);

    ordered_json histogram = ordered_json::array();
    for (const auto& [swaps, count] : r.displacement_histogram) {
        ordered_json h;
        h["swaps"] = swaps;
        h["count"] = count;
        histogram.push_back(std::move(h));
    }
    j["displacement_histogram"] = std::move(histogram);
    j["errors"] = r.errors();
    j["repairs"] = r.repairs;
    j["validity_rate"] = r.instances.empty()
                             ? 0.0
                             : static_cast<double>(r.instances.size() - r.repairs) / static_cast<double>(r.instances.size());

    ordered_json failures = ordered_json::array();
    for (const auto& f : r.failures) {
        ordered_json fj;
        fj["id"] = f.instance_id;
        fj["message"] = f.message;
        failures.push_back(std::move(fj));
    }
    j["failures"] = std::move(failures);

    ordered_json instances = ordered_json::array();
    for (const auto& rec : r.instances) {
        ordered_json ij;
        ij["id"] = rec.result.instance_id;
        ij["n"] = rec.result.n();
        ij["y_pred"] = std::vector<int>(rec.result.y_pred.values().begin(), rec.result.y_pred.values().end());
        ij["y_gold"] = std::vector<int>(rec.result.y_gold.values().begin(), rec.result.y_gold.values().end());
        ij["shuffle_degree"] = to_string(rec.result.shuffle_degree);
        ij["repaired"] = rec.repaired;
        instances.push_back(std::move(ij));
    }
    j["instances"] = std::move(instances);
    return j;
}

ordered_json matrix_to_json(const ZeroShotMatrix& m)
{
    ordered_json j;
    j["schema"] = kMatrixSchema;
    j["train"] = m.train_names;
    j["eval"] = m.eval_names;
    ordered_json cells = ordered_json::array();
    for (const auto& c : m.cells) {
        ordered_json cj;
        cj["train"] = c.train;
        cj["eval"] = c.eval;
        cj["summary"] = c.summary ? summary_to_json(*c.summary) : ordered_json(nullptr);
        cj["error"] = c.error;
        cells.push_back(std::move(cj));
    }
    j["cells"] = std::move(cells);
    return j;
}

// ---- text helpers -----------------------------------------------------------

std::string number(double x)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::string fixed(double x, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

std::string percent(const Rational& r)
{
    return fixed(to_double(r) * 100.0, 2);
}

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string md_cell(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (c == '|') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

std::string report_csv(const EvaluationReport& r)
{
    std::ostringstream out;
    out << "axis,key,count,accuracy,pmr,tau\n";
    for (const auto& [n, s] : r.by_length) {
        out << "length," << n << ',' << s.n_instances << ',' << number(to_double(s.accuracy)) << ','
            << number(to_double(s.pmr)) << ',' << number(to_double(s.tau)) << '\n';
    }
    for (const auto& [tenths, s] : r.by_shuffle) {
        out << "shuffle_degree," << tenths_label(tenths) << ',' << s.n_instances << ','
            << number(to_double(s.accuracy)) << ',' << number(to_double(s.pmr)) << ','
            << number(to_double(s.tau)) << '\n';
    }
    for (const auto& [tenths, b] : r.by_position) {
        out << "position," << tenths_label(tenths) << ',' << b.count << ',' << number(to_double(b.accuracy()))
            << ",,\n";
    }
    for (const auto& [tenths, b] : r.by_displacement) {
        out << "displacement," << tenths_label(tenths) << ',' << b.count << ','
            << number(to_double(b.accuracy())) << ",,\n";
    }
    for (const auto& [swaps, count] : r.displacement_histogram) {
        out << "prediction_displacement," << swaps << ',' << count << ",,,\n";
    }
    return out.str();
}

std::string report_markdown(const EvaluationReport& r)
{
    std::ostringstream out;
    const auto& s = r.summary;
    out << "## " << md_cell(r.config.orderer) << " on " << md_cell(r.config.corpus_name) << "\n\n";
    out << "| Orderer | Acc | PMR | τ | Head Acc | Tail Acc | Instances | Errors | Repairs |\n";
    out << "|---|---|---|---|---|---|---|---|---|\n";
    out << "| " << md_cell(r.config.orderer) << " | " << percent(s.accuracy) << " | " << percent(s.pmr) << " | "
        << fixed(to_double(s.tau), 2) << " | " << percent(s.head_acc) << " | " << percent(s.tail_acc) << " | "
        << s.n_instances << " | " << r.errors() << " | " << r.repairs << " |\n";

    auto summary_table = [&out](std::string_view title, const std::vector<BucketRow>& rows) {
        out << "\n### " << title << "\n\n| Bucket | Count | Acc | PMR | τ |\n|---|---|---|---|---|\n";
        for (const auto& row : rows) {
            out << "| " << row.key << " | " << row.count << " | " << percent(row.accuracy) << " | "
                << percent(row.pmr) << " | " << fixed(to_double(row.tau), 2) << " |\n";
        }
    };
    summary_table("By number of sentences", bucket_report(r, BucketAxis::length));
    summary_table("By degree of shuffling", bucket_report(r, BucketAxis::shuffle_degree));

    auto accuracy_table = [&out](std::string_view title, const TenthsBuckets& buckets) {
        out << "\n### " << title << "\n\n| Bucket | Count | Acc |\n|---|---|---|\n";
        for (const auto& [tenths, b] : buckets) {
            out << "| " << tenths_label(tenths) << " | " << b.count << " | " << percent(b.accuracy()) << " |\n";
        }
    };
    accuracy_table("By relative output position", r.by_position);
    accuracy_table("By relative displacement", r.by_displacement);

    out << "\n### Prediction displacement (wrong predictions)\n\n| Swaps | Count |\n|---|---|\n";
    for (const auto& [swaps, count] : r.displacement_histogram) {
        out << "| " << swaps << " | " << count << " |\n";
    }
    return out.str();
}

std::string matrix_csv(const ZeroShotMatrix& m)
{
    std::ostringstream out;
    out << "train,eval,n_instances,accuracy,pmr,tau,head_acc,tail_acc,error\n";
    for (const auto& c : m.cells) {
        out << csv_field(c.train) << ',' << csv_field(c.eval) << ',';
        if (c.summary) {
            const auto& s = *c.summary;
            out << s.n_instances << ',' << number(to_double(s.accuracy)) << ',' << number(to_double(s.pmr)) << ','
                << number(to_double(s.tau)) << ',' << number(to_double(s.head_acc)) << ','
                << number(to_double(s.tail_acc)) << ",\n";
        } else {
            out << ",,,,,," << csv_field(c.error) << '\n';
        }
    }
    return out.str();
}

std::string matrix_markdown(const ZeroShotMatrix& m)
{
    std::ostringstream out;
    out << "| Trained ↓ / Evaluated → |";
    for (const auto& e : m.eval_names) {
        out << ' ' << md_cell(e) << " |";
    }
    out << "\n|---|";
    for (std::size_t i = 0; i < m.eval_names.size(); ++i) {
        out << "---|";
    }
    out << '\n';
    for (std::size_t row = 0; row < m.train_names.size(); ++row) {
        out << "| " << md_cell(m.train_names[row]) << " |";
        for (std::size_t col = 0; col < m.eval_names.size(); ++col) {
            const auto& c = m.at(row, col);
            if (c.summary) {
                out << ' ' << percent(c.summary->accuracy) << " / " << percent(c.summary->pmr) << " / "
                    << fixed(to_double(c.summary->tau), 2) << " |";
            } else {
                out << " error |";
            }
        }
        out << '\n';
    }
    out << "\nCells: Acc / PMR / τ\n";
    return out.str();
}

json parse_json_text(std::string_view text, std::string_view what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError("malformed " + std::string(what) + " JSON: " + e.what());
    }
}

Permutation permutation_from_json(const json& j)
{
    return Permutation(j.get<std::vector<int>>());
}

} // namespace

std::string render_report(const EvaluationReport& report, ReportFormat format)
{
    switch (format) {
    case ReportFormat::json:
        return report_to_json(report).dump(2) + "\n";
    case ReportFormat::csv:
        return report_csv(report);
    case ReportFormat::markdown:
        return report_markdown(report);
    }
    return {};
}

std::string render_matrix(const ZeroShotMatrix& matrix, ReportFormat format)
{
    switch (format) {
    case ReportFormat::json:
        return matrix_to_json(matrix).dump(2) + "\n";
    case ReportFormat::csv:
        return matrix_csv(matrix);
    case ReportFormat::markdown:
        return matrix_markdown(matrix);
    }
    return {};
}

EvaluationReport parse_report_json(std::string_view text)
{
    const json j = parse_json_text(text, "report");
    try {
        if (j.at("schema").get<std::string>() != kReportSchema) {
            throw DataError("unsupported report schema '" + j.at("schema").get<std::string>() + "'");
        }
        RunConfig config = config_from_json(j.at("config"));
        std::vector<InstanceRecord> records;
        for (const auto& ij : j.at("instances")) {
            InstanceRecord rec;
            rec.result.instance_id = ij.at("id").get<std::string>();
            rec.result.y_pred = permutation_from_json(ij.at("y_pred"));
            rec.result.y_gold = permutation_from_json(ij.at("y_gold"));
            rec.result.shuffle_degree = parse_rational(ij.at("shuffle_degree").get<std::string>());
            rec.repaired = ij.at("repaired").get<bool>();
            if (rec.result.y_pred.size() != rec.result.y_gold.size() ||
                rec.result.n() != ij.at("n").get<std::size_t>()) {
                throw DataError("instance '" + rec.result.instance_id + "' has inconsistent sizes");
            }
            records.push_back(std::move(rec));
        }
        std::vector<InstanceFailure> failures;
        for (const auto& fj : j.at("failures")) {
            failures.push_back({fj.at("id").get<std::string>(), fj.at("message").get<std::string>()});
        }
        EvaluationReport report = assemble_report(std::move(config), std::move(records), std::move(failures));
        if (summary_from_json(j.at("summary")) != report.summary) {
            throw DataError("report summary does not match its per-instance records");
        }
        if (j.at("errors").get<std::size_t>() != report.errors() || j.at("repairs").get<std::size_t>() != report.repairs) {
            throw DataError("report error/repair counts do not match its records");
        }
        return report;
    } catch (const json::exception& e) {
        throw DataError(std::string("report JSON does not follow the schema: ") + e.what());
    }
}

ZeroShotMatrix parse_matrix_json(std::string_view text)
{
    const json j = parse_json_text(text, "zero-shot matrix");
    try {
        if (j.at("schema").get<std::string>() != kMatrixSchema) {
            throw DataError("unsupported matrix schema '" + j.at("schema").get<std::string>() + "'");
        }
        ZeroShotMatrix m;
        m.train_names = j.at("train").get<std::vector<std::string>>();
        m.eval_names = j.at("eval").get<std::vector<std::string>>();
        for (const auto& cj : j.at("cells")) {
            ZeroShotCell cell;
            cell.train = cj.at("train").get<std::string>();
            cell.eval = cj.at("eval").get<std::string>();
            if (!cj.at("summary").is_null()) {
                cell.summary = summary_from_json(cj.at("summary"));
            }
            cell.error = cj.at("error").get<std::string>();
            m.cells.push_back(std::move(cell));
        }
        if (m.cells.size() != m.train_names.size() * m.eval_names.size()) {
            throw DataError("zero-shot matrix has " + std::to_string(m.cells.size()) + " cells for a " +
                            std::to_string(m.train_names.size()) + "x" + std::to_string(m.eval_names.size()) + " grid");
        }
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("zero-shot JSON does not follow the schema: ") + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
        throw DataError("I/O error while writing '" + path.string() + "'");
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_report(const EvaluationReport& report, const std::filesystem::path& path, ReportFormat format)
{
    write_text_file(path, render_report(report, format));
}

void write_report(const ZeroShotMatrix& matrix, const std::filesystem::path& path, ReportFormat format)
{
    write_text_file(path, render_matrix(matrix, format));
}

} // namespace orderbench

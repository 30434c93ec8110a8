#pragma once

#include "orderbench/harness.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace orderbench {

inline constexpr std::string_view kReportSchema = "order-bench-report/1";
inline constexpr std::string_view kMatrixSchema = "order-bench-zeroshot/1";

enum class ReportFormat { json, csv, markdown };

ReportFormat parse_report_format(std::string_view name);

/// JSON is canonical: fixed key order, metrics as numbers plus exact "p/q" strings.
/// CSV has one row per bucket. Markdown renders summary and bucket tables.
std::string render_report(const EvaluationReport& report, ReportFormat format);
std::string render_matrix(const ZeroShotMatrix& matrix, ReportFormat format);

/// Rebuilds a report from its JSON form and checks that the stored summary
/// matches the one re-derived from the per-instance records. Throws DataError.
EvaluationReport parse_report_json(std::string_view text);
ZeroShotMatrix parse_matrix_json(std::string_view text);

/// Throws DataError naming the path on I/O failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

void write_report(const EvaluationReport& report, const std::filesystem::path& path, ReportFormat format);
void write_report(const ZeroShotMatrix& matrix, const std::filesystem::path& path, ReportFormat format);

} // namespace orderbench

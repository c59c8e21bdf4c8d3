#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "recourse/benchmark/runner.hpp"

namespace recourse {

// Markdown: one row per metric with its direction arrow, one column per
// method, "mean ± half_width" cells (batch latency is a bare number).
std::string render_table(const BenchmarkReport& report);

// One row per mutable feature: the input value, then each method's delta
// (0 when untouched). The last row holds the score before and each method's
// score after.
std::string render_examples(const RawProfile& input, const std::map<Method, FeedbackDiff>& diffs,
                            const ProfileSchema& schema);

struct CsvRow {
  std::string method;
  std::string metric;
  double mean = 0.0;
  double ci_half_width = 0.0;
  std::size_t n = 0;
  std::size_t failures = 0;
};

// Header "method,metric,mean,ci_half_width,n,failures".
std::string report_to_csv(const BenchmarkReport& report);
void export_csv(const BenchmarkReport& report, const std::filesystem::path& path);
// Throws ParseError on a malformed line.
std::vector<CsvRow> parse_report_csv(std::string_view text);

}  // namespace recourse

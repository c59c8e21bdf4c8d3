#include "recourse/benchmark/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "recourse/error.hpp"
#include "recourse/util/files.hpp"

namespace recourse {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string_view formula(Metric m) {
  switch (m) {
    case Metric::realism: return "‖AE(x_cf) − x_cf‖²";
    case Metric::prediction_gain: return "C(x_cf) − C(x)";
    case Metric::actionability: return "‖x_cf − x‖₁";
    default: return "-";
  }
}

bool better(Metric m, double a, double b) { return lower_is_better(m) ? a < b : a > b; }

}  // namespace

std::string render_table(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "Test rows: " << report.n_rows << ", data seed: " << report.data_seed
      << ", classifier accuracy: " << fixed(report.classifier_accuracy, 3) << ", run: " << report.timestamp << "\n\n";
  out << "| Metric | Formula |";
  for (Method m : kAllMethods) out << ' ' << method_label(m) << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < std::size(kAllMethods); ++i) out << "---|";
  out << '\n';

  for (Metric metric : kAllMetrics) {
    bool have_best = false;
    double best = 0.0;
    for (Method m : kAllMethods) {
      const auto it = report.methods.find(m);
      if (it == report.methods.end()) continue;
      const double v = it->second.metrics.at(metric).mean;
      if (!have_best || better(metric, v, best)) best = v;
      have_best = true;
    }
    out << "| " << (lower_is_better(metric) ? "↓ " : "↑ ") << metric_label(metric) << " | " << formula(metric)
        << " |";
    for (Method m : kAllMethods) {
      const auto it = report.methods.find(m);
      if (it == report.methods.end()) {
        out << " n/a |";
        continue;
      }
      const MetricRecord& r = it->second.metrics.at(metric);
      std::string cell = fixed(r.mean, 3);
      if (metric != Metric::batch_latency_s) cell += " ± " + fixed(r.ci_half_width, 3);
      if (r.mean == best) cell = "**" + cell + "**";
      out << ' ' << cell << " |";
    }
    out << '\n';
  }

  out << "\nFailures:";
  for (Method m : kAllMethods) {
    const auto it = report.methods.find(m);
    out << ' ' << method_label(m) << ' ' << (it == report.methods.end() ? 0 : it->second.failures);
  }
  out << "\n\nArrows: ↑ higher is better, ↓ lower is better. Best mean in bold.\n";
  return out.str();
}

namespace {

std::string format_value(const FeatureSpec& f, double v) {
  return f.kind == FeatureKind::continuous ? fixed(v, 2) : fixed(v, 0);
}

std::string format_delta(const FeatureSpec& f, double d) {
  if (d == 0.0) return "0";
  const std::string body = format_value(f, std::abs(d));
  return (d > 0.0 ? "+" : "-") + body;
}

}  // namespace

std::string render_examples(const RawProfile& input, const std::map<Method, FeedbackDiff>& diffs,
                            const ProfileSchema& schema) {
  if (input.values.size() != schema.size()) throw SpecError("render_examples: width mismatch");
  std::ostringstream out;
  out << "| Feature | Init. value |";
  for (const auto& [m, diff] : diffs) out << ' ' << method_label(m) << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < diffs.size(); ++i) out << "---|";
  out << '\n';

  for (std::size_t j = 0; j < schema.size(); ++j) {
    const FeatureSpec& f = schema.feature(j);
    if (!f.is_mutable) continue;
    out << "| " << f.name << " | " << format_value(f, input.values[j]) << " |";
    for (const auto& [m, diff] : diffs) {
      double delta = 0.0;
      for (const DiffEntry& e : diff.changes) {
        if (e.feature == f.name) delta = e.delta;
      }
      out << ' ' << format_delta(f, delta) << " |";
    }
    out << '\n';
  }

  double before = 0.0;
  if (!diffs.empty()) before = diffs.begin()->second.score_before;
  out << "| *Classifier score* | *" << fixed(before, 2) << "* |";
  for (const auto& [m, diff] : diffs) out << " *" << fixed(diff.score_after, 2) << "* |";
  out << '\n';
  return out.str();
}

std::string report_to_csv(const BenchmarkReport& report) {
  std::string out = "method,metric,mean,ci_half_width,n,failures\n";
  for (const auto& [m, mr] : report.methods) {
    for (Metric metric : kAllMetrics) {
      const auto it = mr.metrics.find(metric);
      if (it == mr.metrics.end()) continue;
      const std::size_t n = metric == Metric::batch_latency_s ? report.n_rows : mr.successes;
      out += std::string(method_name(m)) + ',' + std::string(metric_name(metric)) + ',' +
             format_double(it->second.mean) + ',' + format_double(it->second.ci_half_width) + ',' +
             std::to_string(n) + ',' + std::to_string(mr.failures) + '\n';
    }
  }
  return out;
}

void export_csv(const BenchmarkReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, report_to_csv(report));
}

namespace {

double parse_real(const std::string& cell, std::size_t row, std::size_t col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw ParseError("report csv: bad number '" + cell + "'", row, col);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("report csv: bad number '" + cell + "'", row, col);
  }
}

std::size_t parse_count(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty() || cell.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("report csv: bad count '" + cell + "'", row, col);
  }
  return std::stoull(cell);
}

}  // namespace

std::vector<CsvRow> parse_report_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "method,metric,mean,ci_half_width,n,failures") {
    throw ParseError("report csv: unexpected header", 0, 0);
  }
  std::vector<CsvRow> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw ParseError("report csv: expected 6 fields", row, cells.size());
    CsvRow r;
    r.method = cells[0];
    r.metric = cells[1];
    r.mean = parse_real(cells[2], row, 2);
    r.ci_half_width = parse_real(cells[3], row, 3);
    r.n = parse_count(cells[4], row, 4);
    r.failures = parse_count(cells[5], row, 5);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace recourse

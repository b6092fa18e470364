#include "fedclave/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fedclave/errors.hpp"

namespace fedclave {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "svg" || name == "svg-plot") return ReportFormat::kSvg;
  throw ConfigError("format", "unknown format '" + std::string(name) +
                                  "' (expected csv, markdown or svg)");
}

std::string_view report_extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv: return "csv";
    case ReportFormat::kMarkdown: return "md";
    case ReportFormat::kSvg: return "svg";
  }
  return "txt";
}

std::string format_score(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

namespace {

std::string metric_cell(const std::optional<MetricsReport>& m, double MetricsReport::*field) {
  return m ? format_score((*m).*field) : std::string("n/a");
}

constexpr double MetricsReport::*kMetricFields[] = {
    &MetricsReport::ari, &MetricsReport::ami, &MetricsReport::homogeneity,
    &MetricsReport::completeness, &MetricsReport::v_measure};

}  // namespace

void write_csv(std::ostream& out, std::span<const ExperimentResult> results) {
  out << kCsvHeader << '\n';
  for (const auto& r : results) {
    out << regime_row_label(r.config.regime) << ',' << r.config.dataset << ','
        << scenario_name(r.config.scenario) << ',' << r.seed_label << ','
        << format_score(r.accuracy_mean) << ',' << format_score(r.accuracy_std);
    for (const auto field : kMetricFields) out << ',' << metric_cell(r.metrics, field);
    out << '\n';
  }
}

void write_markdown(std::ostream& out, std::span<const ExperimentResult> results) {
  out << "| exp_type | dataset | accuracy | ARI | AMI | hom | cmplt | vm |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  std::string last_dataset;
  for (const auto& r : results) {
    out << "| " << regime_row_label(r.config.regime) << " | " << r.config.dataset << " | "
        << format_score(r.accuracy_mean) << " ± " << format_score(r.accuracy_std);
    for (const auto field : kMetricFields) out << " | " << metric_cell(r.metrics, field);
    out << " |\n";
  }
  const auto& c = results.front().config;
  out << "\nScenario: " << scenario_name(c.scenario) << ". Accuracy is the unweighted mean ± "
      << "population std across clusters (oracle: across heterogeneity classes; FL: one "
      << "pooled evaluation). AMI uses arithmetic-mean normalization.\n";
  out << "Clients " << c.n_clients << ", " << c.per_label << " train / " << c.test_per_label
      << " test samples per label, " << c.rounds << " rounds x " << c.epochs
      << " epochs (oracle " << c.oracle_epochs << "), lr " << c.lr << ", batch size "
      << c.batch_size << ", server warm-up " << c.warmup_rounds << " rounds, IFCA init "
      << init_mode_name(c.init_mode) << ", weights U(+-1/sqrt(fan_in)) with zero biases.\n";
}

void write_svg(std::ostream& out, std::span<const ExperimentResult> results) {
  std::vector<std::pair<int, double>> pts;
  for (const auto& r : results) pts.emplace_back(r.config.effective_k(), r.accuracy_mean);
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  constexpr double width = 480, height = 320, margin = 48;
  int kmin = pts.front().first, kmax = pts.back().first;
  double amin = pts.front().second, amax = amin;
  for (const auto& [k, a] : pts) {
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }
  amin = std::floor(amin - 1.0);
  amax = std::ceil(amax + 1.0);
  auto sx = [&](int k) {
    return kmax == kmin ? width / 2
                        : margin + (width - 2 * margin) * (k - kmin) / double(kmax - kmin);
  };
  auto sy = [&](double a) {
    return height - margin - (height - 2 * margin) * (a - amin) / (amax - amin);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">number of clusters k</text>\n";
  out << "<text x=\"14\" y=\"" << height / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << height / 2 << ")\">accuracy (%)</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << sy(amax) + 4
      << "\" text-anchor=\"end\" font-size=\"10\">" << format_score(amax) << "</text>\n";
  out << "<text x=\"" << margin - 4 << "\" y=\"" << sy(amin) + 4
      << "\" text-anchor=\"end\" font-size=\"10\">" << format_score(amin) << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << (i ? " " : "") << format_score(sx(pts[i].first)) << ','
        << format_score(sy(pts[i].second));
  }
  out << "\"/>\n";
  for (const auto& [k, a] : pts) {
    out << "<circle cx=\"" << format_score(sx(k)) << "\" cy=\"" << format_score(sy(a))
        << "\" r=\"3\" fill=\"steelblue\"/>\n";
    out << "<text x=\"" << format_score(sx(k)) << "\" y=\"" << height - margin + 14
        << "\" text-anchor=\"middle\" font-size=\"10\">" << k << "</text>\n";
  }
  out << "</svg>\n";
}

void write_report(std::span<const ExperimentResult> results, const std::filesystem::path& path,
                  ReportFormat format) {
  if (results.empty()) throw Error(ErrorCode::kEmptyInput, "no results to report");
  std::ostringstream buf;
  switch (format) {
    case ReportFormat::kCsv: write_csv(buf, results); break;
    case ReportFormat::kMarkdown: write_markdown(buf, results); break;
    case ReportFormat::kSvg: write_svg(buf, results); break;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << buf.str();
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace fedclave

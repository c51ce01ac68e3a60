// Report emission: results.csv (long format), results.md summary table,
// grouped bar plots as standalone SVG, plus the full JSON report.

#pragma once

#include <string>

#include "harness.hpp"

namespace sigpath {

// columns: dataset,subsampling,imputation,model,seed,metric,value
std::string results_csv(const MetricsReport& report);

// inverse of results_csv over the metric content
MetricsReport report_from_csv(const std::string& csv);

std::string results_markdown(const MetricsReport& report);

// grouped bars, one <g> element per imputation, error bars showing the std
std::string barplot_svg(const MetricsReport& report, const std::string& metric);

// writes results.csv, results.md, report.json, one barplot_<metric>.svg per
// metric and, when present, the per-fit model checkpoints
void emit_report(const MetricsReport& report, const std::string& out_dir);

}  // namespace sigpath

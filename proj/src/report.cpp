#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sigpath {

namespace {

std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_rounded(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string results_csv(const MetricsReport& report) {
  std::string out = "dataset,subsampling,imputation,model,seed,metric,value\n";
  for (const auto& s : report.strategies) {
    for (std::size_t k = 0; k < s.fits.size(); ++k) {
      for (const auto& name : kMetricNames) {
        auto it = s.fits[k].metrics.find(name);
        if (it == s.fits[k].metrics.end()) continue;
        out += report.dataset_name;
        out += ',';
        out += report.subsampling_desc;
        out += ',';
        out += imputation_name(s.imputation);
        out += ",Sig,";
        out += std::to_string(k);
        out += ',';
        out += name;
        out += ',';
        out += fmt_exact(it->second);
        out += '\n';
      }
    }
  }
  return out;
}

MetricsReport report_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("results csv: empty");
  if (split_csv_line(line) !=
      std::vector<std::string>{"dataset", "subsampling", "imputation", "model", "seed", "metric",
                               "value"}) {
    throw std::invalid_argument("results csv: unexpected header");
  }
  MetricsReport report;
  std::map<std::string, std::size_t> strategy_index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 7) {
      throw std::invalid_argument("results csv line " + std::to_string(line_no) +
                                  ": expected 7 fields");
    }
    report.dataset_name = f[0];
    report.subsampling_desc = f[1];
    Imputation imp = imputation_from_string(f[2]);
    auto seed = static_cast<std::size_t>(std::stoul(f[4]));
    double value = std::strtod(f[6].c_str(), nullptr);

    if (!strategy_index.count(f[2])) {
      strategy_index[f[2]] = report.strategies.size();
      report.strategies.push_back({});
      report.strategies.back().imputation = imp;
    }
    auto& sr = report.strategies[strategy_index[f[2]]];
    if (sr.fits.size() <= seed) sr.fits.resize(seed + 1);
    sr.fits[seed].metrics[f[5]] = value;
  }
  return report;
}

std::string results_markdown(const MetricsReport& report) {
  std::ostringstream out;
  out << "# Results: " << report.dataset_name << " (subsampling: " << report.subsampling_desc
      << ")\n\n";
  if (!report.label_rates.empty()) {
    out << "Per-class drop rates:";
    for (double r : report.label_rates) out << " " << fmt_rounded(r);
    out << "\n\n";
  }
  out << "| imputation |";
  for (const auto& name : kMetricNames) out << " " << name << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& s : report.strategies) {
    MetricMap mean = s.mean();
    MetricMap std_ = s.stddev();
    out << "| " << imputation_name(s.imputation) << " |";
    for (const auto& name : kMetricNames) {
      if (!mean.count(name)) {
        out << " - |";
        continue;
      }
      out << " " << fmt_rounded(mean.at(name));
      if (std_.count(name)) out << " ± " << fmt_rounded(std_.at(name));
      out << " |";
    }
    out << "\n";
  }
  out << "\nChosen hyperparameters:\n\n";
  out << "| imputation | lr | weight decay | batch | depth | aug | params |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& s : report.strategies) {
    char lr[32], wd[32];
    std::snprintf(lr, sizeof(lr), "%.2e", s.search.best.lr);
    std::snprintf(wd, sizeof(wd), "%.2e", s.search.best.weight_decay);
    out << "| " << imputation_name(s.imputation) << " | " << lr << " | " << wd << " | "
        << s.search.best.batch << " | " << s.search.best.depth << " | " << s.search.best.aug
        << " | " << s.param_count << " |\n";
  }
  if (!report.notes.empty()) {
    out << "\nNotes:\n";
    for (const auto& n : report.notes) out << "- " << n << "\n";
  }
  return out.str();
}

std::string barplot_svg(const MetricsReport& report, const std::string& metric) {
  const int width = 640, height = 360;
  const int margin_left = 60, margin_bottom = 70, margin_top = 30, margin_right = 20;
  const double plot_w = width - margin_left - margin_right;
  const double plot_h = height - margin_top - margin_bottom;
  std::size_t groups = report.strategies.size();

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "  <text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
      << report.dataset_name << " (" << report.subsampling_desc << "): " << metric
      << "</text>\n";

  // axes and y ticks at 0, 0.25, .., 1
  out << "  <line x1=\"" << margin_left << "\" y1=\"" << margin_top << "\" x2=\"" << margin_left
      << "\" y2=\"" << margin_top + plot_h << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << margin_left << "\" y1=\"" << margin_top + plot_h << "\" x2=\""
      << margin_left + plot_w << "\" y2=\"" << margin_top + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double frac = i / 4.0;
    double y = margin_top + plot_h * (1.0 - frac);
    out << "  <line x1=\"" << margin_left - 4 << "\" y1=\"" << y << "\" x2=\"" << margin_left
        << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << margin_left - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_rounded(frac) << "</text>\n";
  }

  double slot = groups > 0 ? plot_w / static_cast<double>(groups) : plot_w;
  double bar_w = slot * 0.6;
  for (std::size_t g = 0; g < groups; ++g) {
    const auto& s = report.strategies[g];
    MetricMap mean = s.mean();
    MetricMap std_ = s.stddev();
    double m = mean.count(metric) ? mean.at(metric) : 0.0;
    double sd = std_.count(metric) ? std_.at(metric) : 0.0;
    double cx = margin_left + slot * (static_cast<double>(g) + 0.5);
    double x = cx - bar_w / 2.0;
    double bar_h = plot_h * std::clamp(m, 0.0, 1.0);
    double y = margin_top + plot_h - bar_h;
    out << "  <g class=\"bar-group\" id=\"imp-" << imputation_name(s.imputation) << "\">\n";
    out << "    <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w << "\" height=\""
        << bar_h << "\" fill=\"#4878a8\"/>\n";
    if (sd > 0.0) {
      double y_lo = margin_top + plot_h * (1.0 - std::clamp(m - sd, 0.0, 1.0));
      double y_hi = margin_top + plot_h * (1.0 - std::clamp(m + sd, 0.0, 1.0));
      out << "    <line x1=\"" << cx << "\" y1=\"" << y_lo << "\" x2=\"" << cx << "\" y2=\""
          << y_hi << "\" stroke=\"black\"/>\n";
      out << "    <line x1=\"" << cx - 5 << "\" y1=\"" << y_lo << "\" x2=\"" << cx + 5
          << "\" y2=\"" << y_lo << "\" stroke=\"black\"/>\n";
      out << "    <line x1=\"" << cx - 5 << "\" y1=\"" << y_hi << "\" x2=\"" << cx + 5
          << "\" y2=\"" << y_hi << "\" stroke=\"black\"/>\n";
    }
    out << "    <text x=\"" << cx << "\" y=\"" << margin_top + plot_h + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << imputation_name(s.imputation)
        << "</text>\n";
    out << "    <text x=\"" << cx << "\" y=\"" << y - 4
        << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_rounded(m) << "</text>\n";
    out << "  </g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void emit_report(const MetricsReport& report, const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "'");

  write_file(dir / "results.csv", results_csv(report));
  write_file(dir / "results.md", results_markdown(report));
  write_file(dir / "report.json", report.to_json());
  for (const auto& name : kMetricNames) {
    write_file(dir / ("barplot_" + name + ".svg"), barplot_svg(report, name));
  }
  for (const auto& s : report.strategies) {
    for (std::size_t k = 0; k < s.fits.size(); ++k) {
      if (s.fits[k].model_json.empty()) continue;
      write_file(dir / ("model_" + std::string(imputation_name(s.imputation)) + "_fit" +
                        std::to_string(k) + ".json"),
                 s.fits[k].model_json);
    }
  }
}

}  // namespace sigpath

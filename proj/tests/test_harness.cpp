#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "harness.hpp"
#include "json.hpp"
#include "metrics.hpp"
#include "report.hpp"

namespace sigpath {

namespace {

// minimal well-formedness check: tags balance and nest properly
bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '<') {
      ++i;
      continue;
    }
    std::size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;  // self-closing
    if (tag[0] == '/') {
      if (stack.empty()) return false;
      std::string name = tag.substr(1);
      if (stack.back() != name) return false;
      stack.pop_back();
    } else {
      std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
      stack.push_back(name);
    }
  }
  return stack.empty();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

ExperimentConfig small_config() {
  ExperimentConfig config;
  SynthSpec spec;
  spec.classes = 2;
  spec.channels = 2;
  spec.timesteps = 8;
  spec.train_per_class = 8;
  spec.test_per_class = 4;
  spec.noise_std = 0.1;
  config.dataset.name = "synthetic";
  config.dataset.synth = spec;
  config.imputations = {Imputation::Zero, Imputation::GpPom};
  config.search.calls = 2;
  config.search.final_fits = 2;
  config.search.max_epochs = 4;
  config.search.patience = 3;
  config.search.depth_choices = {2};
  config.search.aug_choices = {2};
  config.search.batch_choices = {8};
  config.gp.iters = 10;
  config.seed = 123;
  config.val_fraction = 0.25;
  return config;
}

}  // namespace

TEST_CASE("synth_dataset: shape, determinism, serialization round-trip") {
  SynthSpec spec;
  spec.classes = 2;
  spec.channels = 2;
  spec.timesteps = 20;
  spec.train_per_class = 100;
  spec.test_per_class = 50;
  Rng rng(9);
  auto ds = synth_dataset(spec, rng);
  CHECK(ds.size() == 300);
  CHECK(ds.channels() == 2);

  auto back = parse_long_csv(serialize_series_csv(ds), serialize_labels_csv(ds));
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.instances[i].id == ds.instances[i].id);
    CHECK(back.instances[i].times == ds.instances[i].times);
    CHECK(back.instances[i].values == ds.instances[i].values);
    CHECK(back.labels[i] == ds.labels[i]);
  }

  Rng rng2(9);
  auto again = synth_dataset(spec, rng2);
  CHECK(serialize_series_csv(again) == serialize_series_csv(ds));

  // class-conditional means differ at a fixed timestamp (two-sample check)
  double mean0 = 0.0, mean1 = 0.0;
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& inst = ds.instances[i];
    if (ds.labels[i] == 0) {
      mean0 += inst.at(0, 0);
      ++n0;
    } else {
      mean1 += inst.at(0, 0);
      ++n1;
    }
  }
  CHECK(std::abs(mean0 / n0 - mean1 / n1) > 0.3);
}

TEST_CASE("draw_hyper stays inside the search space") {
  SearchSpace space;
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    auto h = draw_hyper(space, rng);
    CHECK(h.lr >= space.lr_lo);
    CHECK(h.lr <= space.lr_hi);
    CHECK(h.weight_decay >= space.wd_lo);
    CHECK(h.weight_decay <= space.wd_hi);
    CHECK(std::count(space.depth_choices.begin(), space.depth_choices.end(), h.depth) == 1);
    CHECK(std::count(space.aug_choices.begin(), space.aug_choices.end(), h.aug) == 1);
    CHECK(std::count(space.batch_choices.begin(), space.batch_choices.end(), h.batch) == 1);
  }
}

TEST_CASE("derive_seed: pure and tag-separated") {
  CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a", 0) != derive_seed(2, "a", 0));
}

TEST_CASE("experiment config JSON round-trip and validation") {
  auto config = small_config();
  auto text = config.to_json();
  auto back = ExperimentConfig::from_json(text);
  CHECK(back.to_json() == text);

  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"search\": {\"calls\": 0}}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"imputations\": []}"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"subsampling\": {\"mode\": \"nope\"}}"),
                  std::invalid_argument);
}

TEST_CASE("run_experiment: schema, argmax search, determinism") {
  auto config = small_config();
  auto report = run_experiment(config);

  REQUIRE(report.strategies.size() == 2);
  for (const auto& s : report.strategies) {
    CHECK(s.fits.size() == 2);
    CHECK(s.param_count > 0);
    for (const auto& fit : s.fits) {
      for (const auto& name : kMetricNames) {
        REQUIRE(fit.metrics.count(name) == 1);
        CHECK(fit.metrics.at(name) >= 0.0);
        CHECK(fit.metrics.at(name) <= 1.0);
      }
    }
    CHECK(s.search.best_arm >= 0);
    for (const auto& arm : s.search.arms) {
      if (!arm.diverged) CHECK(s.search.best_val >= arm.val_metric);
    }
  }

  auto report2 = run_experiment(config);
  CHECK(results_csv(report) == results_csv(report2));
  // everything except the wall-clock measurement is bit-identical
  auto strip_wall = [](const std::string& text) {
    auto j = nlohmann::json::parse(text);
    for (auto& s : j.at("strategies")) s.erase("wall_seconds");
    return j.dump();
  };
  CHECK(strip_wall(report.to_json()) == strip_wall(report2.to_json()));
}

TEST_CASE("run_experiment: label subsampling records per-class rates") {
  auto config = small_config();
  config.imputations = {Imputation::Indicator};
  config.subsampling.mode = SubsamplingConfig::Mode::Label;
  config.subsampling.lo = 0.3;
  config.subsampling.hi = 0.5;
  auto report = run_experiment(config);
  REQUIRE(report.label_rates.size() == 2);
  for (double r : report.label_rates) {
    CHECK(r >= 0.3);
    CHECK(r <= 0.5);
  }
  CHECK(report.subsampling_desc == "label-0.3-0.5");
}

TEST_CASE("results_csv: row count and re-parse round-trip") {
  auto config = small_config();
  auto report = run_experiment(config);
  auto csv = results_csv(report);
  std::size_t rows = count_occurrences(csv, "\n") - 1;  // minus header
  CHECK(rows == report.strategies.size() * 2 * kMetricNames.size());

  auto back = report_from_csv(csv);
  CHECK(results_csv(back) == csv);
}

TEST_CASE("emit_report writes well-formed artifacts") {
  auto config = small_config();
  config.imputations = {Imputation::Zero, Imputation::Linear, Imputation::Indicator};
  config.search.final_fits = 2;
  auto report = run_experiment(config);

  auto svg = barplot_svg(report, "balanced_accuracy");
  CHECK(xml_well_formed(svg));
  CHECK(count_occurrences(svg, "class=\"bar-group\"") == report.strategies.size());

  auto md = results_markdown(report);
  CHECK(md.find("| imputation |") != std::string::npos);
  CHECK(md.find("zero") != std::string::npos);
}

TEST_CASE("run_experiment: failures flush a partial report before propagating") {
  auto config = small_config();
  config.dataset.synth.reset();
  config.dataset.train_series = "/nonexistent/series.csv";
  config.dataset.train_labels = "/nonexistent/labels.csv";
  config.out_dir = "/tmp/sigpath_partial_report";
  std::filesystem::remove_all(config.out_dir);
  CHECK_THROWS(run_experiment(config));
  std::ifstream in(config.out_dir + "/results.csv");
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "dataset,subsampling,imputation,model,seed,metric,value");
}

TEST_CASE("emit_report: unwritable directory is an error") {
  MetricsReport report;
  report.dataset_name = "x";
  report.subsampling_desc = "none";
  CHECK_THROWS(emit_report(report, "/proc/no_such_dir/out"));
}

TEST_CASE("run_experiment: file-backed dataset with a stratified holdout") {
  SynthSpec spec;
  spec.classes = 2;
  spec.channels = 1;
  spec.timesteps = 6;
  spec.train_per_class = 10;
  spec.test_per_class = 0;
  Rng rng(3);
  auto ds = synth_dataset(spec, rng);
  auto series = serialize_series_csv(ds);
  auto labels = serialize_labels_csv(ds);
  {
    std::ofstream s("/tmp/sigpath_test_series.csv"), l("/tmp/sigpath_test_labels.csv");
    s << series;
    l << labels;
  }
  ExperimentConfig config = small_config();
  config.dataset.synth.reset();
  config.dataset.train_series = "/tmp/sigpath_test_series.csv";
  config.dataset.train_labels = "/tmp/sigpath_test_labels.csv";
  config.dataset.test_fraction = 0.3;
  config.imputations = {Imputation::Zero};
  auto report = run_experiment(config);
  CHECK(report.strategies.size() == 1);
  CHECK(report.strategies[0].fits.size() == 2);
}

}  // namespace sigpath

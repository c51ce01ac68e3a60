// Experiment runner: dataset -> subsampling -> standardization -> imputation
// -> signature model -> metrics -> report, with randomized hyperparameter
// search and repeated final fits.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gp.hpp"
#include "imputation.hpp"
#include "model.hpp"
#include "synth.hpp"
#include "timeseries.hpp"

namespace sigpath {

struct SubsamplingConfig {
  enum class Mode { None, Random, Label };
  Mode mode = Mode::None;
  double drop_fraction = 0.5;  // Random
  double lo = 0.4, hi = 0.6;   // Label
  std::string describe() const;
};

struct GridConfig {
  enum class Mode { Observed, Fixed };
  Mode mode = Mode::Observed;
  double resolution = 0.05;  // Fixed mode, in rescaled time units
};

struct SearchSpace {
  int calls = 20;
  int final_fits = 5;
  int max_epochs = 100;
  int patience = 20;
  std::vector<int> depth_choices = {2, 3, 4};
  std::vector<std::size_t> aug_choices = {2, 3, 4, 5, 6, 7, 8};
  std::vector<std::size_t> batch_choices = {32, 64, 128, 256};
  double lr_lo = 1e-4, lr_hi = 1e-2;
  double wd_lo = 1e-4, wd_hi = 1e-2;
};

struct DatasetSource {
  std::string name = "dataset";
  std::optional<SynthSpec> synth;
  std::string train_series, train_labels;  // file paths (long CSV + labels CSV)
  std::string test_series, test_labels;    // optional predefined test split
  double test_fraction = 0.3;              // used when no test files are given
};

struct ExperimentConfig {
  DatasetSource dataset;
  SubsamplingConfig subsampling;
  std::vector<Imputation> imputations = {Imputation::Zero};
  GridConfig grid;
  GpFitConfig gp;
  std::size_t mc_samples = 10;
  SearchSpace search;
  std::uint64_t seed = 0;
  double val_fraction = 0.2;
  int threads = 1;
  std::string out_dir;
  bool save_models = false;

  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;
  void validate() const;
};

struct HyperDraw {
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::size_t batch = 32;
  int depth = 2;
  std::size_t aug = 3;
};

HyperDraw draw_hyper(const SearchSpace& space, Rng& rng);

struct ArmResult {
  HyperDraw hyper;
  double val_metric = -1.0;
  int epochs = 0;
  bool diverged = false;
};

struct SearchOutcome {
  HyperDraw best;
  double best_val = -1.0;
  int best_arm = -1;
  std::vector<ArmResult> arms;
};

using MetricMap = std::map<std::string, double>;

extern const std::vector<std::string> kMetricNames;

struct FitOutcome {
  MetricMap metrics;
  int epochs = 0;
  std::string model_json;  // only kept when save_models is set
};

struct StrategyResult {
  Imputation imputation = Imputation::Zero;
  SearchOutcome search;
  std::size_t param_count = 0;
  std::vector<FitOutcome> fits;
  double wall_seconds = 0.0;

  MetricMap mean() const;
  MetricMap stddev() const;  // population std over fits; meaningful for >= 2 fits
};

struct MetricsReport {
  std::string dataset_name;
  std::string subsampling_desc;
  std::vector<double> label_rates;  // per class, label-based subsampling only
  std::vector<std::string> notes;
  std::vector<StrategyResult> strategies;

  std::string to_json() const;
};

MetricsReport run_experiment(const ExperimentConfig& config);

}  // namespace sigpath

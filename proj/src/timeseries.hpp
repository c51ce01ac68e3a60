// Irregular multivariate time series with explicit missingness:
// long-format CSV ingestion, random/label-based subsampling,
// per-channel standardization and grid sampling.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rng.hpp"

namespace sigpath {

inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

enum class Split { Train, Val, Test };

// Sorted sequence of (time, partially observed value vector) pairs.
struct IrregularTimeSeries {
  std::string id;
  std::vector<double> times;   // nondecreasing, length n
  std::vector<double> values;  // n x channels, row-major, NaN marks a missing entry
  std::size_t channels = 0;

  std::size_t length() const { return times.size(); }
  double at(std::size_t row, std::size_t ch) const { return values[row * channels + ch]; }
  double& at(std::size_t row, std::size_t ch) { return values[row * channels + ch]; }
  bool observed(std::size_t row, std::size_t ch) const { return !is_missing(at(row, ch)); }
  std::size_t observed_count() const;
  std::size_t observed_count(std::size_t ch) const;

  // throws std::invalid_argument on an invariant violation
  void validate() const;
};

struct LabeledDataset {
  std::vector<IrregularTimeSeries> instances;
  std::vector<int> labels;  // class indices in {0..C-1}
  std::vector<Split> splits;
  std::vector<std::string> channel_names;

  std::size_t size() const { return instances.size(); }
  std::size_t channels() const { return channel_names.size(); }
  int num_classes() const;
  void validate() const;
};

// Per-channel moments over observed entries of the training split
// (population convention; constant channels get stddev 1).
struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

// Series file header: id,time,channel,value. Labels header: id,label.
// Missing entries are absent rows. When expected_channels is nonempty any
// channel outside that list is rejected. All instances are tagged Train.
LabeledDataset parse_long_csv(const std::string& series_text, const std::string& labels_text,
                              const std::vector<std::string>& expected_channels = {});

std::string serialize_series_csv(const LabeledDataset& ds);
std::string serialize_labels_csv(const LabeledDataset& ds);

// Per instance, marks round(drop_fraction * observed_count) observed entries
// missing, chosen uniformly without replacement, keeping at least one
// observation per channel. Rows left fully missing are dropped.
LabeledDataset random_subsample(const LabeledDataset& ds, double drop_fraction, Rng& rng);

// Samples one drop rate per class from Uniform(lo, hi), then subsamples every
// instance of that class at its rate. Rates are reported via rates_out.
LabeledDataset label_based_subsample(const LabeledDataset& ds, double lo, double hi, Rng& rng,
                                     std::vector<double>* rates_out = nullptr);

// Stats over instances whose split is not Test (val is carved out of train).
StandardizationStats fit_standardizer(const LabeledDataset& train);

LabeledDataset apply_standardizer(const LabeledDataset& ds, const StandardizationStats& stats);

// start, start+resolution, ..., plus end if not already included
std::vector<double> sample_grid(double start, double end, double resolution);

// Affine map of every instance's time axis sending [lo, hi] to [0, 1].
LabeledDataset rescale_time_axis(const LabeledDataset& ds, double lo, double hi);

}  // namespace sigpath

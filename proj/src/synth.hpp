// Synthetic labeled datasets: class-dependent sinusoids with noise, regular
// timestamps, separable by curve shape. Desk-scale stand-in for the
// benchmark datasets.

#pragma once

#include <string>

#include "rng.hpp"
#include "timeseries.hpp"

namespace sigpath {

struct SynthSpec {
  int classes = 2;
  int channels = 2;
  int timesteps = 20;
  int train_per_class = 100;
  int test_per_class = 50;
  double noise_std = 0.1;
  double t_start = 0.0;
  double t_end = 1.0;
  // sinusoid structure: frequency and phase offsets per class and channel;
  // smaller class gaps make the classes harder to tell apart
  double freq_base = 1.0;
  double freq_class = 0.75;
  double freq_channel = 0.35;
  double phase_class = 0.9;
  double phase_channel = 0.5;
  double amp_class = 0.0;  // per-class amplitude growth

  static SynthSpec from_json(const std::string& text);
  std::string to_json() const;
  void validate() const;
};

LabeledDataset synth_dataset(const SynthSpec& spec, Rng& rng);

}  // namespace sigpath

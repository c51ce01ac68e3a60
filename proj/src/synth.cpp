#include "synth.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace sigpath {

using nlohmann::json;

SynthSpec SynthSpec::from_json(const std::string& text) {
  json j = json::parse(text);
  SynthSpec s;
  s.classes = j.value("classes", s.classes);
  s.channels = j.value("channels", s.channels);
  s.timesteps = j.value("timesteps", s.timesteps);
  s.train_per_class = j.value("train_per_class", s.train_per_class);
  s.test_per_class = j.value("test_per_class", s.test_per_class);
  s.noise_std = j.value("noise_std", s.noise_std);
  s.t_start = j.value("t_start", s.t_start);
  s.t_end = j.value("t_end", s.t_end);
  s.freq_base = j.value("freq_base", s.freq_base);
  s.freq_class = j.value("freq_class", s.freq_class);
  s.freq_channel = j.value("freq_channel", s.freq_channel);
  s.phase_class = j.value("phase_class", s.phase_class);
  s.phase_channel = j.value("phase_channel", s.phase_channel);
  s.amp_class = j.value("amp_class", s.amp_class);
  s.validate();
  return s;
}

std::string SynthSpec::to_json() const {
  json j = {{"classes", classes},
            {"channels", channels},
            {"timesteps", timesteps},
            {"train_per_class", train_per_class},
            {"test_per_class", test_per_class},
            {"noise_std", noise_std},
            {"t_start", t_start},
            {"t_end", t_end},
            {"freq_base", freq_base},
            {"freq_class", freq_class},
            {"freq_channel", freq_channel},
            {"phase_class", phase_class},
            {"phase_channel", phase_channel},
            {"amp_class", amp_class}};
  return j.dump(2);
}

void SynthSpec::validate() const {
  if (classes < 2 || channels < 1 || timesteps < 2 || train_per_class < 1 ||
      test_per_class < 0 || noise_std < 0.0 || !(t_end > t_start)) {
    throw std::invalid_argument("synth: invalid spec");
  }
}

LabeledDataset synth_dataset(const SynthSpec& spec, Rng& rng) {
  spec.validate();
  LabeledDataset ds;
  for (int c = 0; c < spec.channels; ++c) ds.channel_names.push_back("ch" + std::to_string(c));

  auto make_instance = [&](int cls, int index, Split split) {
    IrregularTimeSeries inst;
    inst.id = std::string(split == Split::Test ? "test" : "train") + "_c" + std::to_string(cls) +
              "_i" + std::to_string(index);
    inst.channels = spec.channels;
    double phase_jitter = 0.15 * rng.normal();
    double amp_jitter = (1.0 + spec.amp_class * cls) * (1.0 + 0.05 * rng.normal());
    for (int t = 0; t < spec.timesteps; ++t) {
      double time = spec.t_start + (spec.t_end - spec.t_start) * static_cast<double>(t) /
                                       static_cast<double>(spec.timesteps - 1);
      inst.times.push_back(time);
      double u = (time - spec.t_start) / (spec.t_end - spec.t_start);
      for (int ch = 0; ch < spec.channels; ++ch) {
        // class-specific frequency and phase make classes separable by shape
        double freq = spec.freq_base + spec.freq_class * cls + spec.freq_channel * ch;
        double phase = spec.phase_class * cls + spec.phase_channel * ch + phase_jitter;
        double v = amp_jitter * std::sin(2.0 * 3.14159265358979323846 * freq * u + phase) +
                   spec.noise_std * rng.normal();
        inst.values.push_back(v);
      }
    }
    ds.instances.push_back(std::move(inst));
    ds.labels.push_back(cls);
    ds.splits.push_back(split);
  };

  for (int cls = 0; cls < spec.classes; ++cls) {
    for (int i = 0; i < spec.train_per_class; ++i) make_instance(cls, i, Split::Train);
  }
  for (int cls = 0; cls < spec.classes; ++cls) {
    for (int i = 0; i < spec.test_per_class; ++i) make_instance(cls, i, Split::Test);
  }
  ds.validate();
  return ds;
}

}  // namespace sigpath

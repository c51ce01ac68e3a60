#include "timeseries.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace sigpath {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& s, const char* what, std::size_t line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed " + what + " '" +
                                s + "'");
  }
  return v;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur)) out.push_back(cur);
  return out;
}

}  // namespace

std::size_t IrregularTimeSeries::observed_count() const {
  std::size_t n = 0;
  for (double v : values) {
    if (!is_missing(v)) ++n;
  }
  return n;
}

std::size_t IrregularTimeSeries::observed_count(std::size_t ch) const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < length(); ++r) {
    if (observed(r, ch)) ++n;
  }
  return n;
}

void IrregularTimeSeries::validate() const {
  if (length() < 1 || channels < 1) {
    throw std::invalid_argument("series '" + id + "': needs n >= 1 and d >= 1");
  }
  if (values.size() != length() * channels) {
    throw std::invalid_argument("series '" + id + "': value matrix shape mismatch");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) {
      throw std::invalid_argument("series '" + id + "': times not nondecreasing");
    }
  }
  for (std::size_t r = 0; r < length(); ++r) {
    bool any = false;
    for (std::size_t c = 0; c < channels; ++c) any = any || observed(r, c);
    if (!any) throw std::invalid_argument("series '" + id + "': fully missing row");
  }
}

int LabeledDataset::num_classes() const {
  int c = 0;
  for (int l : labels) c = std::max(c, l + 1);
  return c;
}

void LabeledDataset::validate() const {
  if (instances.size() != labels.size() || instances.size() != splits.size()) {
    throw std::invalid_argument("dataset: instances/labels/splits length mismatch");
  }
  for (const auto& inst : instances) {
    if (inst.channels != channel_names.size()) {
      throw std::invalid_argument("dataset: channel count mismatch in '" + inst.id + "'");
    }
    inst.validate();
  }
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("dataset: negative class index");
  }
}

LabeledDataset parse_long_csv(const std::string& series_text, const std::string& labels_text,
                              const std::vector<std::string>& expected_channels) {
  auto series_lines = lines_of(series_text);
  if (series_lines.empty()) throw std::invalid_argument("series file: empty");
  {
    auto header = split_fields(series_lines[0]);
    if (header != std::vector<std::string>{"id", "time", "channel", "value"}) {
      throw std::invalid_argument("series file: expected header id,time,channel,value");
    }
  }

  struct Obs {
    double time;
    std::string channel;
    double value;
  };
  std::vector<std::string> id_order;
  std::unordered_map<std::string, std::vector<Obs>> by_id;
  std::set<std::string> channel_set;
  std::set<std::string> allowed(expected_channels.begin(), expected_channels.end());

  for (std::size_t li = 1; li < series_lines.size(); ++li) {
    if (trim(series_lines[li]).empty()) continue;
    auto f = split_fields(series_lines[li]);
    if (f.size() != 4) {
      throw std::invalid_argument("line " + std::to_string(li + 1) + ": expected 4 fields");
    }
    if (f[0].empty() || f[2].empty()) {
      throw std::invalid_argument("line " + std::to_string(li + 1) + ": empty id or channel");
    }
    if (!expected_channels.empty() && !allowed.count(f[2])) {
      throw std::invalid_argument("line " + std::to_string(li + 1) + ": unknown channel '" +
                                  f[2] + "'");
    }
    Obs o{parse_number(f[1], "time", li + 1), f[2], parse_number(f[3], "value", li + 1)};
    if (!by_id.count(f[0])) id_order.push_back(f[0]);
    by_id[f[0]].push_back(std::move(o));
    channel_set.insert(f[2]);
  }
  if (id_order.empty()) throw std::invalid_argument("series file: no data rows");

  // channel order is sorted by name so that serialize/parse round-trips
  std::vector<std::string> channels(channel_set.begin(), channel_set.end());
  if (!expected_channels.empty()) channels = expected_channels;
  std::map<std::string, std::size_t> channel_index;
  for (std::size_t i = 0; i < channels.size(); ++i) channel_index[channels[i]] = i;

  std::unordered_map<std::string, int> label_by_id;
  if (!labels_text.empty()) {
    auto label_lines = lines_of(labels_text);
    if (label_lines.empty()) throw std::invalid_argument("labels file: empty");
    auto header = split_fields(label_lines[0]);
    if (header != std::vector<std::string>{"id", "label"}) {
      throw std::invalid_argument("labels file: expected header id,label");
    }
    for (std::size_t li = 1; li < label_lines.size(); ++li) {
      if (trim(label_lines[li]).empty()) continue;
      auto f = split_fields(label_lines[li]);
      if (f.size() != 2) {
        throw std::invalid_argument("labels line " + std::to_string(li + 1) +
                                    ": expected 2 fields");
      }
      double v = parse_number(f[1], "label", li + 1);
      int label = static_cast<int>(v);
      if (label < 0 || static_cast<double>(label) != v) {
        throw std::invalid_argument("labels line " + std::to_string(li + 1) +
                                    ": label must be a class index >= 0");
      }
      if (label_by_id.count(f[0])) {
        throw std::invalid_argument("labels line " + std::to_string(li + 1) + ": duplicate id '" +
                                    f[0] + "'");
      }
      if (!by_id.count(f[0])) {
        throw std::invalid_argument("labels file: id '" + f[0] + "' has no series data");
      }
      label_by_id[f[0]] = label;
    }
  }

  LabeledDataset ds;
  ds.channel_names = channels;
  for (const auto& id : id_order) {
    auto& obs = by_id[id];
    std::stable_sort(obs.begin(), obs.end(),
                     [](const Obs& a, const Obs& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < obs.size(); ++i) {
      if (obs[i].time == obs[i - 1].time && obs[i].channel == obs[i - 1].channel) {
        throw std::invalid_argument("series '" + id + "': duplicate (id,time,channel) at t=" +
                                    format_number(obs[i].time));
      }
    }

    IrregularTimeSeries inst;
    inst.id = id;
    inst.channels = channels.size();
    for (std::size_t i = 0; i < obs.size();) {
      std::size_t j = i;
      while (j < obs.size() && obs[j].time == obs[i].time) ++j;
      inst.times.push_back(obs[i].time);
      std::vector<double> row(channels.size(), missing_value());
      for (std::size_t k = i; k < j; ++k) row[channel_index[obs[k].channel]] = obs[k].value;
      inst.values.insert(inst.values.end(), row.begin(), row.end());
      i = j;
    }
    inst.validate();

    int label = 0;
    if (!labels_text.empty()) {
      auto it = label_by_id.find(id);
      if (it == label_by_id.end()) {
        throw std::invalid_argument("labels file: missing label for id '" + id + "'");
      }
      label = it->second;
    }
    ds.instances.push_back(std::move(inst));
    ds.labels.push_back(label);
    ds.splits.push_back(Split::Train);
  }
  ds.validate();
  return ds;
}

std::string serialize_series_csv(const LabeledDataset& ds) {
  std::string out = "id,time,channel,value\n";
  for (const auto& inst : ds.instances) {
    for (std::size_t r = 0; r < inst.length(); ++r) {
      for (std::size_t c = 0; c < inst.channels; ++c) {
        if (!inst.observed(r, c)) continue;
        out += inst.id;
        out += ',';
        out += format_number(inst.times[r]);
        out += ',';
        out += ds.channel_names[c];
        out += ',';
        out += format_number(inst.at(r, c));
        out += '\n';
      }
    }
  }
  return out;
}

std::string serialize_labels_csv(const LabeledDataset& ds) {
  std::string out = "id,label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out += ds.instances[i].id;
    out += ',';
    out += std::to_string(ds.labels[i]);
    out += '\n';
  }
  return out;
}

namespace {

IrregularTimeSeries subsample_instance(const IrregularTimeSeries& in, double drop_fraction,
                                       Rng& rng) {
  struct Entry {
    std::size_t row, ch;
  };
  std::vector<Entry> entries;
  std::vector<std::size_t> per_channel(in.channels, 0);
  for (std::size_t r = 0; r < in.length(); ++r) {
    for (std::size_t c = 0; c < in.channels; ++c) {
      if (in.observed(r, c)) {
        entries.push_back({r, c});
        ++per_channel[c];
      }
    }
  }
  auto target = static_cast<std::size_t>(std::llround(drop_fraction * entries.size()));
  std::size_t removable = 0;
  for (std::size_t k : per_channel) {
    if (k > 0) removable += k - 1;
  }
  if (target == 0 || target > removable) return in;

  rng.shuffle(entries);
  IrregularTimeSeries out = in;
  std::size_t removed = 0;
  for (const auto& e : entries) {
    if (removed == target) break;
    if (per_channel[e.ch] < 2) continue;
    out.at(e.row, e.ch) = missing_value();
    --per_channel[e.ch];
    ++removed;
  }

  // drop rows that became fully missing
  IrregularTimeSeries packed;
  packed.id = out.id;
  packed.channels = out.channels;
  for (std::size_t r = 0; r < out.length(); ++r) {
    bool any = false;
    for (std::size_t c = 0; c < out.channels; ++c) any = any || out.observed(r, c);
    if (!any) continue;
    packed.times.push_back(out.times[r]);
    for (std::size_t c = 0; c < out.channels; ++c) packed.values.push_back(out.at(r, c));
  }
  return packed;
}

}  // namespace

LabeledDataset random_subsample(const LabeledDataset& ds, double drop_fraction, Rng& rng) {
  if (drop_fraction < 0.0 || drop_fraction >= 1.0) {
    throw std::invalid_argument("random_subsample: drop_fraction must be in [0,1)");
  }
  LabeledDataset out = ds;
  for (auto& inst : out.instances) inst = subsample_instance(inst, drop_fraction, rng);
  return out;
}

LabeledDataset label_based_subsample(const LabeledDataset& ds, double lo, double hi, Rng& rng,
                                     std::vector<double>* rates_out) {
  if (lo < 0.0 || hi < lo || hi >= 1.0) {
    throw std::invalid_argument("label_based_subsample: need 0 <= lo <= hi < 1");
  }
  int classes = ds.num_classes();
  std::vector<double> rates(classes, 0.0);
  for (int c = 0; c < classes; ++c) rates[c] = rng.uniform(lo, hi);
  if (rates_out) *rates_out = rates;

  LabeledDataset out = ds;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.instances[i] = subsample_instance(out.instances[i], rates[out.labels[i]], rng);
  }
  return out;
}

StandardizationStats fit_standardizer(const LabeledDataset& train) {
  std::size_t d = train.channels();
  std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
  std::vector<std::size_t> count(d, 0);
  bool any_instance = false;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.splits[i] == Split::Test) continue;
    any_instance = true;
    const auto& inst = train.instances[i];
    for (std::size_t r = 0; r < inst.length(); ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        if (!inst.observed(r, c)) continue;
        sum[c] += inst.at(r, c);
        sumsq[c] += inst.at(r, c) * inst.at(r, c);
        ++count[c];
      }
    }
  }
  if (!any_instance) throw std::invalid_argument("fit_standardizer: empty training split");

  StandardizationStats stats;
  stats.mean.resize(d);
  stats.stddev.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    if (count[c] == 0) {
      throw std::invalid_argument("fit_standardizer: channel '" + train.channel_names[c] +
                                  "' has no observed entries");
    }
    double mean = sum[c] / static_cast<double>(count[c]);
    double var = sumsq[c] / static_cast<double>(count[c]) - mean * mean;
    double sd = var > 0.0 ? std::sqrt(var) : 0.0;
    stats.mean[c] = mean;
    stats.stddev[c] = sd > 0.0 ? sd : 1.0;  // constant channels
  }
  return stats;
}

LabeledDataset apply_standardizer(const LabeledDataset& ds, const StandardizationStats& stats) {
  if (stats.mean.size() != ds.channels() || stats.stddev.size() != ds.channels()) {
    throw std::invalid_argument("apply_standardizer: channel count mismatch");
  }
  LabeledDataset out = ds;
  for (auto& inst : out.instances) {
    for (std::size_t r = 0; r < inst.length(); ++r) {
      for (std::size_t c = 0; c < inst.channels; ++c) {
        if (inst.observed(r, c)) {
          inst.at(r, c) = (inst.at(r, c) - stats.mean[c]) / stats.stddev[c];
        }
      }
    }
  }
  return out;
}

std::vector<double> sample_grid(double start, double end, double resolution) {
  if (end < start) throw std::invalid_argument("sample_grid: end < start");
  if (!(resolution > 0.0)) throw std::invalid_argument("sample_grid: resolution must be > 0");
  std::vector<double> grid;
  double tol = 1e-12 * std::max({1.0, std::abs(start), std::abs(end)});
  for (std::size_t k = 0;; ++k) {
    double t = start + static_cast<double>(k) * resolution;
    if (t > end - tol) break;
    grid.push_back(t);
  }
  if (grid.empty() || grid.back() < end) grid.push_back(end);
  return grid;
}

LabeledDataset rescale_time_axis(const LabeledDataset& ds, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("rescale_time_axis: need hi > lo");
  LabeledDataset out = ds;
  double scale = 1.0 / (hi - lo);
  for (auto& inst : out.instances) {
    for (auto& t : inst.times) t = (t - lo) * scale;
  }
  return out;
}

}  // namespace sigpath

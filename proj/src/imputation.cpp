#include "imputation.hpp"

#include <algorithm>
#include <stdexcept>

namespace sigpath {

namespace {

const std::pair<Imputation, const char*> kNames[] = {
    {Imputation::Linear, "linear"},     {Imputation::ForwardFill, "forward-fill"},
    {Imputation::Zero, "zero"},         {Imputation::Indicator, "indicator"},
    {Imputation::Causal, "causal"},     {Imputation::GpMean, "gp-mean"},
    {Imputation::GpMc, "gp-mc"},        {Imputation::GpPom, "gp-pom"},
};

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("impute: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] < grid[i - 1]) throw std::invalid_argument("impute: grid not sorted");
  }
}

// index of the original row whose timestamp equals g exactly, or npos
std::size_t matching_row(const IrregularTimeSeries& ts, double g) {
  auto it = std::lower_bound(ts.times.begin(), ts.times.end(), g);
  if (it != ts.times.end() && *it == g) return static_cast<std::size_t>(it - ts.times.begin());
  return static_cast<std::size_t>(-1);
}

PiecewiseLinearPath grid_path(const std::vector<double>& grid, std::size_t dim) {
  PiecewiseLinearPath p;
  p.dim = dim;
  p.params = grid;
  p.values.assign(grid.size() * dim, 0.0);
  return p;
}

// per-channel observation list
struct ChannelObs {
  std::vector<double> times, values;
};

std::vector<ChannelObs> collect_observations(const IrregularTimeSeries& ts) {
  std::vector<ChannelObs> obs(ts.channels);
  for (std::size_t r = 0; r < ts.length(); ++r) {
    for (std::size_t c = 0; c < ts.channels; ++c) {
      if (ts.observed(r, c)) {
        obs[c].times.push_back(ts.times[r]);
        obs[c].values.push_back(ts.at(r, c));
      }
    }
  }
  return obs;
}

}  // namespace

Imputation imputation_from_string(std::string_view name) {
  for (const auto& [tag, str] : kNames) {
    if (name == str) return tag;
  }
  throw std::invalid_argument("unknown imputation strategy '" + std::string(name) + "'");
}

const char* imputation_name(Imputation s) {
  for (const auto& [tag, str] : kNames) {
    if (tag == s) return str;
  }
  return "?";
}

const std::vector<Imputation>& all_imputations() {
  static const std::vector<Imputation> all = {
      Imputation::Linear, Imputation::ForwardFill, Imputation::Zero,   Imputation::Indicator,
      Imputation::Causal, Imputation::GpMean,      Imputation::GpMc,   Imputation::GpPom};
  return all;
}

PiecewiseLinearPath impute_linear(const IrregularTimeSeries& ts, const std::vector<double>& grid) {
  check_grid(grid);
  auto obs = collect_observations(ts);
  PiecewiseLinearPath p = grid_path(grid, ts.channels);
  for (std::size_t c = 0; c < ts.channels; ++c) {
    const auto& o = obs[c];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      double g = grid[k];
      // 0 before the first and after the last observation (the mean, for
      // standardised data)
      if (o.times.empty() || g < o.times.front() || g > o.times.back()) continue;
      auto it = std::lower_bound(o.times.begin(), o.times.end(), g);
      std::size_t hi = static_cast<std::size_t>(it - o.times.begin());
      if (hi < o.times.size() && o.times[hi] == g) {
        p.value(k, c) = o.values[hi];
      } else {
        std::size_t lo = hi - 1;
        double w = (g - o.times[lo]) / (o.times[hi] - o.times[lo]);
        p.value(k, c) = (1.0 - w) * o.values[lo] + w * o.values[hi];
      }
    }
  }
  return time_augment(p);
}

PiecewiseLinearPath impute_forward_fill(const IrregularTimeSeries& ts,
                                        const std::vector<double>& grid) {
  check_grid(grid);
  auto obs = collect_observations(ts);
  PiecewiseLinearPath p = grid_path(grid, ts.channels);
  for (std::size_t c = 0; c < ts.channels; ++c) {
    const auto& o = obs[c];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      auto it = std::upper_bound(o.times.begin(), o.times.end(), grid[k]);
      if (it == o.times.begin()) continue;  // leading missing stays 0
      p.value(k, c) = o.values[static_cast<std::size_t>(it - o.times.begin()) - 1];
    }
  }
  return time_augment(p);
}

PiecewiseLinearPath impute_zero(const IrregularTimeSeries& ts, const std::vector<double>& grid) {
  check_grid(grid);
  PiecewiseLinearPath p = grid_path(grid, ts.channels);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::size_t row = matching_row(ts, grid[k]);
    if (row == static_cast<std::size_t>(-1)) continue;
    for (std::size_t c = 0; c < ts.channels; ++c) {
      if (ts.observed(row, c)) p.value(k, c) = ts.at(row, c);
    }
  }
  return time_augment(p);
}

PiecewiseLinearPath impute_indicator(const IrregularTimeSeries& ts,
                                     const std::vector<double>& grid) {
  check_grid(grid);
  std::size_t d = ts.channels;
  PiecewiseLinearPath p = grid_path(grid, 2 * d);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::size_t row = matching_row(ts, grid[k]);
    if (row == static_cast<std::size_t>(-1)) continue;  // indicator stays 0 off-timestamp
    for (std::size_t c = 0; c < d; ++c) {
      if (ts.observed(row, c)) {
        p.value(k, c) = ts.at(row, c);
        p.value(k, d + c) = 1.0;
      }
    }
  }
  return time_augment(p);
}

PiecewiseLinearPath causal_transform(const std::vector<double>& times,
                                     const std::vector<double>& values, std::size_t dim) {
  if (times.empty()) throw std::invalid_argument("causal_transform: empty input");
  if (values.size() != times.size() * dim) {
    throw std::invalid_argument("causal_transform: value matrix shape mismatch");
  }
  for (double v : values) {
    if (is_missing(v)) {
      throw std::invalid_argument("causal_transform: input must be fully observed");
    }
  }
  std::size_t n = times.size();
  PiecewiseLinearPath p;
  p.dim = dim + 1;  // time is a channel; the parameter is the knot index
  p.values.reserve((2 * n - 1) * p.dim);
  auto push = [&](double t, std::size_t value_row) {
    p.values.push_back(t);
    for (std::size_t c = 0; c < dim; ++c) p.values.push_back(values[value_row * dim + c]);
  };
  // (t1,x1),(t2,x1),(t2,x2),(t3,x2),...: time first, then the value
  push(times[0], 0);
  for (std::size_t i = 1; i < n; ++i) {
    push(times[i], i - 1);
    push(times[i], i);
  }
  p.params.resize(p.values.size() / p.dim);
  for (std::size_t i = 0; i < p.params.size(); ++i) p.params[i] = static_cast<double>(i);
  return p;
}

PiecewiseLinearPath impute_causal(const IrregularTimeSeries& ts,
                                  const std::vector<double>& grid) {
  check_grid(grid);
  // c = forward fill as the causal data imputer, evaluated on the grid
  auto obs = collect_observations(ts);
  std::size_t d = ts.channels;
  std::vector<double> filled(grid.size() * d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    const auto& o = obs[c];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      auto it = std::upper_bound(o.times.begin(), o.times.end(), grid[k]);
      if (it == o.times.begin()) continue;
      filled[k * d + c] = o.values[static_cast<std::size_t>(it - o.times.begin()) - 1];
    }
  }
  return causal_transform(grid, filled, d);
}

std::size_t imputed_data_dim(Imputation strategy, std::size_t channels) {
  switch (strategy) {
    case Imputation::Indicator:
    case Imputation::GpPom:
      return 2 * channels;
    default:
      return channels;
  }
}

PiecewiseLinearPath impute(const IrregularTimeSeries& ts, Imputation strategy,
                           const std::vector<double>& grid, const ImputeContext& ctx) {
  switch (strategy) {
    case Imputation::Linear:
      return impute_linear(ts, grid);
    case Imputation::ForwardFill:
      return impute_forward_fill(ts, grid);
    case Imputation::Zero:
      return impute_zero(ts, grid);
    case Imputation::Indicator:
      return impute_indicator(ts, grid);
    case Imputation::Causal:
      return impute_causal(ts, grid);
    case Imputation::GpMean:
    case Imputation::GpMc:
    case Imputation::GpPom: {
      if (!ctx.posterior) {
        throw std::invalid_argument("impute: GP strategy requires a fitted posterior");
      }
      check_grid(grid);
      if (strategy == Imputation::GpMean) return mean_path(*ctx.posterior, grid);
      if (strategy == Imputation::GpPom) return pom_path(*ctx.posterior, grid);
      Rng rng(ctx.seed);
      return mc_sample(*ctx.posterior, grid, 1, rng).front();
    }
  }
  throw std::invalid_argument("impute: unknown strategy");
}

}  // namespace sigpath

// Per-channel Gaussian-process regression with RBF kernels: marginal
// likelihood fitting, posterior queries, Monte-Carlo sample paths and the
// posterior-moments path that concatenates mean and variance channels.

#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "rng.hpp"
#include "signature.hpp"
#include "timeseries.hpp"

namespace sigpath {

struct RbfHyperparams {
  double lengthscale = 1.0;     // > 0
  double output_scale = 1.0;    // sigma^2 > 0
  double noise_variance = 0.1;  // sigma_n^2 >= 0
};

struct GpFitConfig {
  int iters = 100;
  double jitter_init = 1e-6;  // first nonzero jitter, as a fraction of sigma^2
  double jitter_max = 1e-2;   // escalation cap, as a fraction of sigma^2
};

struct ChannelObservations {
  std::vector<double> times;
  std::vector<double> values;
};

double rbf_kernel(double t, double u, const RbfHyperparams& h);

// lengthscale from the median gap of observed times, output scale from the
// channel variance, noise at a tenth of that
RbfHyperparams default_init(const ChannelObservations& obs);

struct FitTrace {
  std::vector<double> log_marginal;  // value after every accepted step
};

// Gradient ascent on the exact log marginal likelihood in log-parameter
// space with backtracking halving. Throws on a non-finite likelihood.
RbfHyperparams fit_hyperparams(const ChannelObservations& obs, const RbfHyperparams& init,
                               const GpFitConfig& cfg = {}, FitTrace* trace = nullptr);

struct PosteriorQuery {
  std::vector<double> mean;
  std::vector<double> variance;  // diagonal only, clamped at 0
};

// One-shot posterior for a single channel.
PosteriorQuery posterior(const ChannelObservations& obs, const RbfHyperparams& h,
                         const std::vector<double>& query_times, const GpFitConfig& cfg = {});

// Fitted per-channel posteriors for one instance. Channels are modeled by
// independent GPs; every channel needs at least one observation. A channel
// with a single observation keeps its init hyperparameters. Passing
// fixed_hyperparams (one triple per channel) skips the fit entirely.
class GpPosterior {
 public:
  GpPosterior(const IrregularTimeSeries& ts, const GpFitConfig& cfg = {},
              const std::vector<RbfHyperparams>& fixed_hyperparams = {});
  ~GpPosterior();
  GpPosterior(GpPosterior&&) noexcept;
  GpPosterior& operator=(GpPosterior&&) noexcept;
  GpPosterior(const GpPosterior&) = delete;
  GpPosterior& operator=(const GpPosterior&) = delete;

  std::size_t channels() const;
  const RbfHyperparams& hyperparams(std::size_t ch) const;
  const ChannelObservations& observations(std::size_t ch) const;

  PosteriorQuery query(std::size_t ch, const std::vector<double>& query_times) const;

  // joint posterior over the grid, factorized for repeated sampling
  struct JointPosterior {
    std::vector<double> mean;        // one per grid point
    std::vector<double> chol_lower;  // m x m row-major lower factor of the covariance
    std::vector<double> draw(Rng& rng) const;
  };
  JointPosterior joint(std::size_t ch, const std::vector<double>& grid) const;

  // joint draw over the grid for one channel, one standard normal per point
  std::vector<double> sample(std::size_t ch, const std::vector<double>& grid, Rng& rng) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// S independent draws from the joint posterior per channel, each returned as
// a time-augmented piecewise-linear path on the grid
std::vector<PiecewiseLinearPath> mc_sample(const GpPosterior& post,
                                           const std::vector<double>& grid, std::size_t samples,
                                           Rng& rng);

// posterior mean per channel, time-augmented
PiecewiseLinearPath mean_path(const GpPosterior& post, const std::vector<double>& grid);

// posterior moments path: channels 1..d are means, d+1..2d are variances
PiecewiseLinearPath pom_path(const GpPosterior& post, const std::vector<double>& grid);

}  // namespace sigpath

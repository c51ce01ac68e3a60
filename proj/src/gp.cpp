#include "gp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigpath {

namespace {

constexpr double kLogParamBound = 14.0;  // clamp for log-space ascent steps

Eigen::MatrixXd rbf_gram(const std::vector<double>& a, const std::vector<double>& b,
                         const RbfHyperparams& h) {
  Eigen::MatrixXd k(a.size(), b.size());
  double inv2l2 = 0.5 / (h.lengthscale * h.lengthscale);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double dt = a[i] - b[j];
      k(i, j) = h.output_scale * std::exp(-dt * dt * inv2l2);
    }
  }
  return k;
}

// Cholesky with escalating diagonal jitter: no jitter first, then
// jitter_init*scale growing tenfold up to jitter_max*scale.
Eigen::LLT<Eigen::MatrixXd> jittered_llt(const Eigen::MatrixXd& m, double scale,
                                         double jitter_init, double jitter_max,
                                         double* jitter_used = nullptr) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    if (jitter_used) *jitter_used = 0.0;
    return llt;
  }
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  for (double j = jitter_init; j <= jitter_max * (1.0 + 1e-12); j *= 10.0) {
    llt.compute(m + j * scale * id);
    if (llt.info() == Eigen::Success) {
      if (jitter_used) *jitter_used = j * scale;
      return llt;
    }
  }
  throw std::runtime_error("gp: Cholesky failed after jitter escalation");
}

struct LmlResult {
  double value;
  Eigen::VectorXd alpha;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

LmlResult log_marginal(const ChannelObservations& obs, const RbfHyperparams& h,
                       const GpFitConfig& cfg) {
  auto n = static_cast<Eigen::Index>(obs.times.size());
  Eigen::MatrixXd k = rbf_gram(obs.times, obs.times, h);
  k.diagonal().array() += h.noise_variance;
  LmlResult r;
  r.llt = jittered_llt(k, h.output_scale, cfg.jitter_init, cfg.jitter_max);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(obs.values.data(), n);
  r.alpha = r.llt.solve(y);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(r.llt.matrixL()(i, i));
  r.value = -0.5 * y.dot(r.alpha) - logdet -
            0.5 * static_cast<double>(n) * std::log(2.0 * 3.14159265358979323846);
  return r;
}

}  // namespace

double rbf_kernel(double t, double u, const RbfHyperparams& h) {
  if (!(h.lengthscale > 0.0) || !(h.output_scale > 0.0) || h.noise_variance < 0.0) {
    throw std::invalid_argument("rbf_kernel: invalid hyperparameters");
  }
  double dt = t - u;
  return h.output_scale * std::exp(-dt * dt / (2.0 * h.lengthscale * h.lengthscale));
}

RbfHyperparams default_init(const ChannelObservations& obs) {
  RbfHyperparams h;
  std::vector<double> gaps;
  for (std::size_t i = 1; i < obs.times.size(); ++i) {
    double g = obs.times[i] - obs.times[i - 1];
    if (g > 0.0) gaps.push_back(g);
  }
  if (!gaps.empty()) {
    std::sort(gaps.begin(), gaps.end());
    h.lengthscale = gaps[gaps.size() / 2];
  } else {
    h.lengthscale = 1.0;
  }
  double mean = 0.0;
  for (double v : obs.values) mean += v;
  mean /= std::max<std::size_t>(1, obs.values.size());
  double var = 0.0;
  for (double v : obs.values) var += (v - mean) * (v - mean);
  var /= std::max<std::size_t>(1, obs.values.size());
  h.output_scale = var > 0.0 ? var : 1.0;
  h.noise_variance = 0.1 * h.output_scale;
  return h;
}

RbfHyperparams fit_hyperparams(const ChannelObservations& obs, const RbfHyperparams& init,
                               const GpFitConfig& cfg, FitTrace* trace) {
  if (obs.times.size() < 2) {
    throw std::invalid_argument("fit_hyperparams: need at least two observations");
  }
  if (obs.times.size() != obs.values.size()) {
    throw std::invalid_argument("fit_hyperparams: times/values length mismatch");
  }

  Eigen::Vector3d theta(std::log(init.lengthscale), std::log(init.output_scale),
                        std::log(std::max(init.noise_variance, 1e-12)));
  auto to_params = [](const Eigen::Vector3d& t) {
    RbfHyperparams h;
    h.lengthscale = std::exp(t[0]);
    h.output_scale = std::exp(t[1]);
    h.noise_variance = std::exp(t[2]);
    return h;
  };

  auto n = static_cast<Eigen::Index>(obs.times.size());
  auto eval = [&](const Eigen::Vector3d& t) { return log_marginal(obs, to_params(t), cfg); };

  LmlResult cur = eval(theta);
  if (!std::isfinite(cur.value)) {
    throw std::runtime_error("fit_hyperparams: non-finite log marginal likelihood");
  }
  if (trace) trace->log_marginal.push_back(cur.value);

  for (int iter = 0; iter < cfg.iters; ++iter) {
    RbfHyperparams h = to_params(theta);
    // A = alpha alpha^T - K^{-1}; dL/dtheta_i = tr(A dK/dtheta_i) / 2
    Eigen::MatrixXd kinv = cur.llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd a = cur.alpha * cur.alpha.transpose() - kinv;

    Eigen::MatrixXd kf = rbf_gram(obs.times, obs.times, h);
    Eigen::MatrixXd dl = kf;  // kf .* (dt^2 / l^2)
    double invl2 = 1.0 / (h.lengthscale * h.lengthscale);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double dt = obs.times[i] - obs.times[j];
        dl(i, j) *= dt * dt * invl2;
      }
    }
    Eigen::Vector3d grad;
    grad[0] = 0.5 * (a.array() * dl.array()).sum();
    grad[1] = 0.5 * (a.array() * kf.array()).sum();
    grad[2] = 0.5 * h.noise_variance * a.trace();

    double step = 0.5;
    bool accepted = false;
    for (int halving = 0; halving < 25; ++halving) {
      Eigen::Vector3d candidate = theta + step * grad;
      for (int i = 0; i < 3; ++i) {
        candidate[i] = std::clamp(candidate[i], -kLogParamBound, kLogParamBound);
      }
      LmlResult next;
      bool ok = true;
      try {
        next = eval(candidate);
      } catch (const std::runtime_error&) {
        ok = false;
      }
      if (ok && std::isfinite(next.value) && next.value >= cur.value) {
        theta = candidate;
        cur = std::move(next);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // converged: no uphill step found
    if (trace) trace->log_marginal.push_back(cur.value);
  }
  return to_params(theta);
}

PosteriorQuery posterior(const ChannelObservations& obs, const RbfHyperparams& h,
                         const std::vector<double>& query_times, const GpFitConfig& cfg) {
  if (obs.times.empty()) throw std::invalid_argument("posterior: no observations");
  auto n = static_cast<Eigen::Index>(obs.times.size());
  Eigen::MatrixXd k = rbf_gram(obs.times, obs.times, h);
  k.diagonal().array() += h.noise_variance;
  auto llt = jittered_llt(k, h.output_scale, cfg.jitter_init, cfg.jitter_max);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(obs.values.data(), n);
  Eigen::VectorXd alpha = llt.solve(y);

  Eigen::MatrixXd kxq = rbf_gram(obs.times, query_times, h);
  Eigen::VectorXd mean = kxq.transpose() * alpha;
  Eigen::MatrixXd v = llt.matrixL().solve(kxq);

  PosteriorQuery out;
  out.mean.assign(mean.data(), mean.data() + mean.size());
  out.variance.resize(query_times.size());
  for (std::size_t i = 0; i < query_times.size(); ++i) {
    double var = h.output_scale - v.col(static_cast<Eigen::Index>(i)).squaredNorm();
    out.variance[i] = std::max(0.0, var);
  }
  return out;
}

struct GpPosterior::Impl {
  GpFitConfig cfg;
  struct Channel {
    ChannelObservations obs;
    RbfHyperparams hyper;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd alpha;
  };
  std::vector<Channel> channels;
};

GpPosterior::GpPosterior(const IrregularTimeSeries& ts, const GpFitConfig& cfg,
                         const std::vector<RbfHyperparams>& fixed_hyperparams)
    : impl_(std::make_unique<Impl>()) {
  impl_->cfg = cfg;
  ts.validate();
  if (!fixed_hyperparams.empty() && fixed_hyperparams.size() != ts.channels) {
    throw std::invalid_argument("gp: fixed hyperparameter count mismatch");
  }
  for (std::size_t c = 0; c < ts.channels; ++c) {
    Impl::Channel ch;
    for (std::size_t r = 0; r < ts.length(); ++r) {
      if (ts.observed(r, c)) {
        ch.obs.times.push_back(ts.times[r]);
        ch.obs.values.push_back(ts.at(r, c));
      }
    }
    if (ch.obs.times.empty()) {
      throw std::invalid_argument("gp: channel " + std::to_string(c) +
                                  " of '" + ts.id + "' has no observations");
    }
    if (!fixed_hyperparams.empty()) {
      ch.hyper = fixed_hyperparams[c];
    } else {
      ch.hyper = default_init(ch.obs);
      if (ch.obs.times.size() >= 2 && cfg.iters > 0) {
        try {
          ch.hyper = fit_hyperparams(ch.obs, ch.hyper, cfg);
        } catch (const std::runtime_error&) {
          // degenerate data: keep the init
        }
      }
    }
    auto n = static_cast<Eigen::Index>(ch.obs.times.size());
    Eigen::MatrixXd k = rbf_gram(ch.obs.times, ch.obs.times, ch.hyper);
    k.diagonal().array() += ch.hyper.noise_variance;
    ch.llt = jittered_llt(k, ch.hyper.output_scale, cfg.jitter_init, cfg.jitter_max);
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ch.obs.values.data(), n);
    ch.alpha = ch.llt.solve(y);
    impl_->channels.push_back(std::move(ch));
  }
}

GpPosterior::~GpPosterior() = default;
GpPosterior::GpPosterior(GpPosterior&&) noexcept = default;
GpPosterior& GpPosterior::operator=(GpPosterior&&) noexcept = default;

std::size_t GpPosterior::channels() const { return impl_->channels.size(); }

const RbfHyperparams& GpPosterior::hyperparams(std::size_t ch) const {
  return impl_->channels.at(ch).hyper;
}

const ChannelObservations& GpPosterior::observations(std::size_t ch) const {
  return impl_->channels.at(ch).obs;
}

PosteriorQuery GpPosterior::query(std::size_t ch, const std::vector<double>& query_times) const {
  const auto& c = impl_->channels.at(ch);
  Eigen::MatrixXd kxq = rbf_gram(c.obs.times, query_times, c.hyper);
  Eigen::VectorXd mean = kxq.transpose() * c.alpha;
  Eigen::MatrixXd v = c.llt.matrixL().solve(kxq);
  PosteriorQuery out;
  out.mean.assign(mean.data(), mean.data() + mean.size());
  out.variance.resize(query_times.size());
  for (std::size_t i = 0; i < query_times.size(); ++i) {
    double var = c.hyper.output_scale - v.col(static_cast<Eigen::Index>(i)).squaredNorm();
    out.variance[i] = std::max(0.0, var);
  }
  return out;
}

std::vector<double> GpPosterior::JointPosterior::draw(Rng& rng) const {
  std::size_t m = mean.size();
  std::vector<double> z(m), out(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = rng.normal();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = mean[i];
    const double* row = chol_lower.data() + i * m;
    for (std::size_t j = 0; j <= i; ++j) acc += row[j] * z[j];
    out[i] = acc;
  }
  return out;
}

GpPosterior::JointPosterior GpPosterior::joint(std::size_t ch,
                                               const std::vector<double>& grid) const {
  const auto& c = impl_->channels.at(ch);
  auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd kqq = rbf_gram(grid, grid, c.hyper);
  Eigen::MatrixXd kxq = rbf_gram(c.obs.times, grid, c.hyper);
  Eigen::VectorXd mean = kxq.transpose() * c.alpha;
  Eigen::MatrixXd v = c.llt.matrixL().solve(kxq);
  Eigen::MatrixXd cov = kqq - v.transpose() * v;
  // the posterior covariance is singular wherever the grid touches an
  // observation, so escalation starts far smaller than for the data solve
  auto llt = jittered_llt(cov, c.hyper.output_scale, 1e-12, impl_->cfg.jitter_max);
  Eigen::MatrixXd lower = llt.matrixL();
  JointPosterior out;
  out.mean.assign(mean.data(), mean.data() + mean.size());
  out.chol_lower.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      out.chol_lower[static_cast<std::size_t>(i) * m + j] = lower(i, j);
    }
  }
  return out;
}

std::vector<double> GpPosterior::sample(std::size_t ch, const std::vector<double>& grid,
                                        Rng& rng) const {
  return joint(ch, grid).draw(rng);
}

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("gp: empty query grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] < grid[i - 1]) throw std::invalid_argument("gp: query grid not sorted");
  }
}

PiecewiseLinearPath augment_grid_path(const std::vector<double>& grid,
                                      const std::vector<std::vector<double>>& channels) {
  PiecewiseLinearPath raw;
  raw.dim = channels.size();
  raw.params = grid;
  raw.values.resize(grid.size() * channels.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t c = 0; c < channels.size(); ++c) raw.values[k * raw.dim + c] = channels[c][k];
  }
  return time_augment(raw);
}

}  // namespace

std::vector<PiecewiseLinearPath> mc_sample(const GpPosterior& post,
                                           const std::vector<double>& grid, std::size_t samples,
                                           Rng& rng) {
  if (samples < 1) throw std::invalid_argument("mc_sample: need at least one sample");
  check_grid(grid);
  std::vector<PiecewiseLinearPath> out;
  out.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<std::vector<double>> channels(post.channels());
    for (std::size_t c = 0; c < post.channels(); ++c) channels[c] = post.sample(c, grid, rng);
    out.push_back(augment_grid_path(grid, channels));
  }
  return out;
}

PiecewiseLinearPath mean_path(const GpPosterior& post, const std::vector<double>& grid) {
  check_grid(grid);
  std::vector<std::vector<double>> channels(post.channels());
  for (std::size_t c = 0; c < post.channels(); ++c) channels[c] = post.query(c, grid).mean;
  return augment_grid_path(grid, channels);
}

PiecewiseLinearPath pom_path(const GpPosterior& post, const std::vector<double>& grid) {
  check_grid(grid);
  std::size_t d = post.channels();
  std::vector<std::vector<double>> channels(2 * d);
  for (std::size_t c = 0; c < d; ++c) {
    PosteriorQuery q = post.query(c, grid);
    channels[c] = std::move(q.mean);
    channels[d + c] = std::move(q.variance);
  }
  return augment_grid_path(grid, channels);
}

}  // namespace sigpath

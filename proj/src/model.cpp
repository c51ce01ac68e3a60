#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "metrics.hpp"

namespace sigpath {

namespace {

using nlohmann::json;

std::size_t feature_size_for(std::size_t a, int depth) { return signature_size(a, depth); }

void matvec_t(const std::vector<double>& w, std::size_t rows, std::size_t cols,
              const std::vector<double>& x, const std::vector<double>& b,
              std::vector<double>& out) {
  // out[c] = sum_r x[r] * w[r*cols + c] + b[c]
  out.assign(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double xr = x[r];
    if (xr == 0.0) continue;
    const double* row = w.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) out[c] += xr * row[c];
  }
  for (std::size_t c = 0; c < cols; ++c) out[c] += b[c];
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

struct ForwardPass {
  PiecewiseLinearPath aug_path;
  TruncatedSignature sig;
  std::vector<double> features, z1, h1, z2, h2, logits, probs;
};

ForwardPass run_forward(const SigModelParams& params, const PiecewiseLinearPath& path) {
  const auto& cfg = params.cfg;
  if (path.dim != cfg.input_dim) {
    throw std::invalid_argument("model: path dimension mismatch");
  }
  ForwardPass fp;
  fp.aug_path.dim = cfg.aug_width;
  fp.aug_path.params = path.params;
  fp.aug_path.values.assign(path.knots() * cfg.aug_width, 0.0);
  for (std::size_t k = 0; k < path.knots(); ++k) {
    for (std::size_t i = 0; i < cfg.input_dim; ++i) {
      double xi = path.value(k, i);
      if (xi == 0.0) continue;
      const double* row = params.aug.data() + i * cfg.aug_width;
      double* out = fp.aug_path.values.data() + k * cfg.aug_width;
      for (std::size_t j = 0; j < cfg.aug_width; ++j) out[j] += xi * row[j];
    }
  }
  fp.sig = signature(fp.aug_path, cfg.depth);
  fp.features = fp.sig.coeffs();

  std::size_t f = fp.features.size(), h = cfg.hidden;
  matvec_t(params.w1, f, h, fp.features, params.b1, fp.z1);
  fp.h1 = fp.z1;
  for (double& v : fp.h1) v = std::max(0.0, v);
  matvec_t(params.w2, h, h, fp.h1, params.b2, fp.z2);
  fp.h2 = fp.z2;
  for (double& v : fp.h2) v = std::max(0.0, v);
  matvec_t(params.w_out, h, cfg.classes, fp.h2, params.b_out, fp.logits);
  fp.probs = softmax(fp.logits);
  return fp;
}

}  // namespace

std::size_t SigModelParams::feature_size() const {
  return feature_size_for(cfg.aug_width, cfg.depth);
}

std::size_t SigModelParams::param_count() const {
  return aug.size() + w1.size() + b1.size() + w2.size() + b2.size() + w_out.size() +
         b_out.size();
}

SigModelParams SigModelParams::init(const SigModelConfig& cfg, Rng& rng) {
  if (cfg.input_dim == 0 || cfg.aug_width == 0 || cfg.classes < 2 || cfg.hidden == 0) {
    throw std::invalid_argument("model: invalid configuration");
  }
  std::size_t f = feature_size_for(cfg.aug_width, cfg.depth);
  SigModelParams p;
  p.cfg = cfg;
  auto fill = [&rng](std::vector<double>& v, std::size_t n, double scale) {
    v.resize(n);
    for (double& x : v) x = rng.normal() * scale;
  };
  fill(p.aug, cfg.input_dim * cfg.aug_width, 1.0 / std::sqrt(static_cast<double>(cfg.input_dim)));
  fill(p.w1, f * cfg.hidden, std::sqrt(2.0 / static_cast<double>(f)));
  p.b1.assign(cfg.hidden, 0.0);
  fill(p.w2, cfg.hidden * cfg.hidden, std::sqrt(2.0 / static_cast<double>(cfg.hidden)));
  p.b2.assign(cfg.hidden, 0.0);
  fill(p.w_out, cfg.hidden * cfg.classes, std::sqrt(1.0 / static_cast<double>(cfg.hidden)));
  p.b_out.assign(cfg.classes, 0.0);
  if (p.param_count() > cfg.max_params) {
    throw std::invalid_argument("model: parameter count " + std::to_string(p.param_count()) +
                                " exceeds the budget of " + std::to_string(cfg.max_params));
  }
  return p;
}

std::string SigModelParams::to_json() const {
  json j;
  j["config"] = {{"input_dim", cfg.input_dim}, {"aug_width", cfg.aug_width},
                 {"depth", cfg.depth},         {"classes", cfg.classes},
                 {"hidden", cfg.hidden},       {"max_params", cfg.max_params}};
  j["params"] = {{"augmentation", aug}, {"dense1_weight", w1}, {"dense1_bias", b1},
                 {"dense2_weight", w2}, {"dense2_bias", b2},   {"output_weight", w_out},
                 {"output_bias", b_out}};
  return j.dump(2);
}

SigModelParams SigModelParams::from_json(const std::string& text) {
  json j = json::parse(text);
  SigModelParams p;
  const auto& c = j.at("config");
  p.cfg.input_dim = c.at("input_dim").get<std::size_t>();
  p.cfg.aug_width = c.at("aug_width").get<std::size_t>();
  p.cfg.depth = c.at("depth").get<int>();
  p.cfg.classes = c.at("classes").get<int>();
  p.cfg.hidden = c.at("hidden").get<std::size_t>();
  p.cfg.max_params = c.at("max_params").get<std::size_t>();
  const auto& q = j.at("params");
  p.aug = q.at("augmentation").get<std::vector<double>>();
  p.w1 = q.at("dense1_weight").get<std::vector<double>>();
  p.b1 = q.at("dense1_bias").get<std::vector<double>>();
  p.w2 = q.at("dense2_weight").get<std::vector<double>>();
  p.b2 = q.at("dense2_bias").get<std::vector<double>>();
  p.w_out = q.at("output_weight").get<std::vector<double>>();
  p.b_out = q.at("output_bias").get<std::vector<double>>();
  return p;
}

SigModelGrads::SigModelGrads(const SigModelConfig& cfg) {
  std::size_t f = feature_size_for(cfg.aug_width, cfg.depth);
  aug.assign(cfg.input_dim * cfg.aug_width, 0.0);
  w1.assign(f * cfg.hidden, 0.0);
  b1.assign(cfg.hidden, 0.0);
  w2.assign(cfg.hidden * cfg.hidden, 0.0);
  b2.assign(cfg.hidden, 0.0);
  w_out.assign(cfg.hidden * cfg.classes, 0.0);
  b_out.assign(cfg.classes, 0.0);
}

void SigModelGrads::zero() {
  for (auto* v : {&aug, &w1, &b1, &w2, &b2, &w_out, &b_out}) {
    std::fill(v->begin(), v->end(), 0.0);
  }
}

void SigModelGrads::scale(double s) {
  for (auto* v : {&aug, &w1, &b1, &w2, &b2, &w_out, &b_out}) {
    for (double& x : *v) x *= s;
  }
}

std::vector<double> forward(const SigModelParams& params, const PiecewiseLinearPath& path) {
  return run_forward(params, path).probs;
}

double backward(const SigModelParams& params, const PiecewiseLinearPath& path, int label,
                SigModelGrads& grads) {
  const auto& cfg = params.cfg;
  if (label < 0 || label >= cfg.classes) throw std::invalid_argument("model: label out of range");
  ForwardPass fp = run_forward(params, path);
  double loss = -std::log(std::max(fp.probs[label], 1e-300));

  std::size_t f = fp.features.size(), h = cfg.hidden;
  auto classes = static_cast<std::size_t>(cfg.classes);

  // softmax cross-entropy: dlogits = p - onehot
  std::vector<double> dlogits = fp.probs;
  dlogits[label] -= 1.0;

  std::vector<double> dh2(h, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = params.w_out.data() + r * classes;
    double* grow = grads.w_out.data() + r * classes;
    double acc = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      grow[c] += fp.h2[r] * dlogits[c];
      acc += row[c] * dlogits[c];
    }
    dh2[r] = acc;
  }
  for (std::size_t c = 0; c < classes; ++c) grads.b_out[c] += dlogits[c];

  std::vector<double> dz2(h);
  for (std::size_t r = 0; r < h; ++r) dz2[r] = fp.z2[r] > 0.0 ? dh2[r] : 0.0;

  std::vector<double> dh1(h, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = params.w2.data() + r * h;
    double* grow = grads.w2.data() + r * h;
    double acc = 0.0;
    for (std::size_t c = 0; c < h; ++c) {
      grow[c] += fp.h1[r] * dz2[c];
      acc += row[c] * dz2[c];
    }
    dh1[r] = acc;
  }
  for (std::size_t c = 0; c < h; ++c) grads.b2[c] += dz2[c];

  std::vector<double> dz1(h);
  for (std::size_t r = 0; r < h; ++r) dz1[r] = fp.z1[r] > 0.0 ? dh1[r] : 0.0;

  std::vector<double> dfeat(f, 0.0);
  for (std::size_t r = 0; r < f; ++r) {
    const double* row = params.w1.data() + r * h;
    double* grow = grads.w1.data() + r * h;
    double fr = fp.features[r];
    double acc = 0.0;
    for (std::size_t c = 0; c < h; ++c) {
      grow[c] += fr * dz1[c];
      acc += row[c] * dz1[c];
    }
    dfeat[r] = acc;
  }
  for (std::size_t c = 0; c < h; ++c) grads.b1[c] += dz1[c];

  // through the signature to the augmented knot values
  TruncatedSignature upstream(cfg.aug_width, cfg.depth);
  upstream.coeffs() = dfeat;
  std::vector<double> dknots = signature_backward(fp.aug_path, cfg.depth, upstream);

  // u_t = A^T x_t: dA[i][j] += x_t[i] * du_t[j]
  for (std::size_t k = 0; k < path.knots(); ++k) {
    const double* du = dknots.data() + k * cfg.aug_width;
    for (std::size_t i = 0; i < cfg.input_dim; ++i) {
      double xi = path.value(k, i);
      if (xi == 0.0) continue;
      double* grow = grads.aug.data() + i * cfg.aug_width;
      for (std::size_t j = 0; j < cfg.aug_width; ++j) grow[j] += xi * du[j];
    }
  }
  return loss;
}

AdamState::AdamState(const SigModelParams& params) {
  m.assign(params.param_count(), 0.0);
  v.assign(params.param_count(), 0.0);
}

void adam_update(std::span<double> params, std::span<double> m, std::span<double> v, long step,
                 std::span<const double> grads, double lr, double weight_decay) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  if (params.size() != grads.size() || params.size() != m.size() || params.size() != v.size()) {
    throw std::invalid_argument("adam_update: shape mismatch");
  }
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double grad = grads[i];
    if (!std::isfinite(grad)) throw std::runtime_error("adam_update: non-finite gradient");
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad;
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad * grad;
    double mhat = m[i] / bc1;
    double vhat = v[i] / bc2;
    params[i] -= lr * (mhat / (std::sqrt(vhat) + eps) + weight_decay * params[i]);
  }
}

void adam_step(SigModelParams& params, AdamState& state, const SigModelGrads& grads, double lr,
               double weight_decay) {
  std::vector<double>* p[] = {&params.aug, &params.w1, &params.b1, &params.w2,
                              &params.b2,  &params.w_out, &params.b_out};
  const std::vector<double>* g[] = {&grads.aug, &grads.w1, &grads.b1, &grads.w2,
                                    &grads.b2,  &grads.w_out, &grads.b_out};
  state.step += 1;
  std::size_t off = 0;
  for (int blk = 0; blk < 7; ++blk) {
    auto& pv = *p[blk];
    adam_update({pv.data(), pv.size()}, {state.m.data() + off, pv.size()},
                {state.v.data() + off, pv.size()}, state.step, {g[blk]->data(), g[blk]->size()},
                lr, weight_decay);
    off += pv.size();
  }
}

FixedPathSource::FixedPathSource(std::vector<PiecewiseLinearPath> paths, std::vector<int> labels)
    : paths_(std::move(paths)), labels_(std::move(labels)) {
  if (paths_.size() != labels_.size()) {
    throw std::invalid_argument("path source: paths/labels length mismatch");
  }
}

std::vector<double> predict_proba(const SigModelParams& params, const PathSource& src,
                                  std::size_t i, std::uint64_t ctx_seed) {
  std::size_t draws = src.draws();
  std::vector<double> probs(params.cfg.classes, 0.0);
  for (std::size_t s = 0; s < draws; ++s) {
    std::vector<double> p = forward(params, src.sample(i, s, ctx_seed));
    for (std::size_t c = 0; c < probs.size(); ++c) probs[c] += p[c];
  }
  for (double& v : probs) v /= static_cast<double>(draws);
  return probs;
}

namespace {

double eval_metric(const SigModelParams& params, const PathSource& src, SelectionMetric metric,
                   std::uint64_t ctx_seed) {
  std::vector<int> y_true(src.size()), y_pred(src.size());
  std::vector<double> pos_score(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    std::vector<double> p = predict_proba(params, src, i, ctx_seed);
    y_true[i] = src.label(i);
    y_pred[i] = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    pos_score[i] = p.size() > 1 ? p[1] : 0.0;
  }
  if (metric == SelectionMetric::AveragePrecision) {
    return average_precision(y_true, pos_score);
  }
  return balanced_accuracy(y_true, y_pred);
}

}  // namespace

TrainResult train(const SigModelConfig& cfg, const PathSource& train_src,
                  const PathSource& val_src, const TrainConfig& tc) {
  if (train_src.size() == 0 || val_src.size() == 0) {
    throw std::invalid_argument("train: empty split");
  }
  Rng init_rng(derive_seed(tc.seed, "init"));
  SigModelParams params = SigModelParams::init(cfg, init_rng);
  AdamState state(params);
  SigModelGrads grads(cfg);

  TrainResult res;
  res.best = params;
  res.best_val_metric = -1.0;

  std::vector<std::size_t> order(train_src.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(tc.seed, "shuffle"));
  std::uint64_t val_seed = derive_seed(tc.seed, "val");
  std::size_t draws = train_src.draws();
  int since_best = 0;

  for (int epoch = 0; epoch < tc.max_epochs; ++epoch) {
    std::uint64_t epoch_seed = derive_seed(tc.seed, "epoch", static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      std::size_t stop = std::min(start + tc.batch_size, order.size());
      grads.zero();
      for (std::size_t i = start; i < stop; ++i) {
        std::size_t inst = order[i];
        for (std::size_t s = 0; s < draws; ++s) {
          loss_sum += backward(params, train_src.sample(inst, s, epoch_seed),
                               train_src.label(inst), grads) /
                      static_cast<double>(draws);
        }
      }
      grads.scale(1.0 / (static_cast<double>(stop - start) * static_cast<double>(draws)));
      adam_step(params, state, grads, tc.lr, tc.weight_decay);
    }
    double mean_loss = loss_sum / static_cast<double>(order.size());
    if (!std::isfinite(mean_loss)) throw std::runtime_error("train: loss diverged");
    res.loss_trace.push_back(mean_loss);

    double metric = eval_metric(params, val_src, tc.metric, val_seed);
    res.val_trace.push_back(metric);
    res.epochs_run = epoch + 1;
    if (metric > res.best_val_metric) {
      res.best_val_metric = metric;
      res.best = params;
      res.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= tc.patience) {
      break;
    }
  }
  return res;
}

}  // namespace sigpath

// Shallow signature classifier: learned linear channel augmentation, the
// truncated signature, two dense layers of width 30 and a softmax head,
// trained end-to-end with Adam through the differentiable signature.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rng.hpp"
#include "signature.hpp"

namespace sigpath {

enum class SelectionMetric { BalancedAccuracy, AveragePrecision };

struct SigModelConfig {
  std::size_t input_dim = 0;  // path dimension, time channel included
  std::size_t aug_width = 3;  // a
  int depth = 2;              // signature truncation depth N
  int classes = 2;
  std::size_t hidden = 30;
  std::size_t max_params = 1500000;
};

struct SigModelParams {
  SigModelConfig cfg;
  std::vector<double> aug;            // input_dim x aug_width
  std::vector<double> w1, b1;         // F x hidden, hidden
  std::vector<double> w2, b2;         // hidden x hidden, hidden
  std::vector<double> w_out, b_out;   // hidden x classes, classes

  std::size_t feature_size() const;   // F = sum_{k=1..N} a^k
  std::size_t param_count() const;

  // throws if the parameter count exceeds cfg.max_params
  static SigModelParams init(const SigModelConfig& cfg, Rng& rng);

  // flat JSON object of named parameter arrays plus the config
  std::string to_json() const;
  static SigModelParams from_json(const std::string& text);
};

struct SigModelGrads {
  std::vector<double> aug, w1, b1, w2, b2, w_out, b_out;
  explicit SigModelGrads(const SigModelConfig& cfg);
  void zero();
  void scale(double s);
};

// class probabilities; pure function of (params, path)
std::vector<double> forward(const SigModelParams& params, const PiecewiseLinearPath& path);

// cross-entropy loss of one instance; gradients are accumulated into grads
double backward(const SigModelParams& params, const PiecewiseLinearPath& path, int label,
                SigModelGrads& grads);

struct AdamState {
  std::vector<double> m, v;
  long step = 0;
  explicit AdamState(const SigModelParams& params);
};

// one Adam update (beta1 0.9, beta2 0.999, eps 1e-8) with decoupled weight
// decay on a flat parameter block; step is 1-based and drives the bias
// correction; throws on non-finite gradients
void adam_update(std::span<double> params, std::span<double> m, std::span<double> v, long step,
                 std::span<const double> grads, double lr, double weight_decay);

// applies adam_update across every parameter block of the model
void adam_step(SigModelParams& params, AdamState& state, const SigModelGrads& grads, double lr,
               double weight_decay);

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::size_t batch_size = 32;
  int max_epochs = 100;
  int patience = 20;
  std::uint64_t seed = 0;
  SelectionMetric metric = SelectionMetric::BalancedAccuracy;
};

// Training data abstraction: fixed strategies expose one path per instance;
// the MC adapter draws fresh posterior samples per epoch, so paths are
// requested with a context seed.
class PathSource {
 public:
  virtual ~PathSource() = default;
  virtual std::size_t size() const = 0;
  virtual int label(std::size_t i) const = 0;
  virtual std::size_t draws() const { return 1; }
  virtual PiecewiseLinearPath sample(std::size_t i, std::size_t draw,
                                     std::uint64_t ctx_seed) const = 0;
};

class FixedPathSource : public PathSource {
 public:
  FixedPathSource(std::vector<PiecewiseLinearPath> paths, std::vector<int> labels);
  std::size_t size() const override { return paths_.size(); }
  int label(std::size_t i) const override { return labels_[i]; }
  PiecewiseLinearPath sample(std::size_t i, std::size_t, std::uint64_t) const override {
    return paths_[i];
  }

 private:
  std::vector<PiecewiseLinearPath> paths_;
  std::vector<int> labels_;
};

// probabilities averaged over the source's draws
std::vector<double> predict_proba(const SigModelParams& params, const PathSource& src,
                                  std::size_t i, std::uint64_t ctx_seed);

struct TrainResult {
  SigModelParams best;
  double best_val_metric = 0.0;
  int best_epoch = -1;
  int epochs_run = 0;
  std::vector<double> loss_trace;  // mean train loss per epoch
  std::vector<double> val_trace;   // validation metric per epoch
};

// Mini-batch Adam with early stopping on the validation metric; returns the
// parameter snapshot with the best validation performance.
TrainResult train(const SigModelConfig& cfg, const PathSource& train_src,
                  const PathSource& val_src, const TrainConfig& tc);

}  // namespace sigpath

#include "doctest.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "model.hpp"

namespace sigpath {

namespace {

PiecewiseLinearPath random_model_path(Rng& rng, std::size_t dim, std::size_t knots) {
  PiecewiseLinearPath p;
  p.dim = dim;
  for (std::size_t k = 0; k < knots; ++k) {
    p.params.push_back(static_cast<double>(k));
    for (std::size_t c = 0; c < dim; ++c) p.values.push_back(rng.normal());
  }
  return p;
}

// line path from a to b over `knots` steps in one data channel plus time
PiecewiseLinearPath line_path(double a, double b, std::size_t knots, double noise, Rng& rng) {
  PiecewiseLinearPath p;
  p.dim = 2;
  for (std::size_t k = 0; k < knots; ++k) {
    double t = static_cast<double>(k) / static_cast<double>(knots - 1);
    p.params.push_back(t);
    p.values.push_back(t);
    p.values.push_back(a + (b - a) * t + noise * rng.normal());
  }
  return p;
}

std::vector<double> flatten_grads(const SigModelGrads& g) {
  std::vector<double> out;
  for (const auto* v : {&g.aug, &g.w1, &g.b1, &g.w2, &g.b2, &g.w_out, &g.b_out}) {
    out.insert(out.end(), v->begin(), v->end());
  }
  return out;
}

double* param_entry(SigModelParams& p, std::size_t flat_index) {
  std::vector<double>* blocks[] = {&p.aug, &p.w1, &p.b1, &p.w2, &p.b2, &p.w_out, &p.b_out};
  for (auto* blk : blocks) {
    if (flat_index < blk->size()) return blk->data() + flat_index;
    flat_index -= blk->size();
  }
  return nullptr;
}

}  // namespace

TEST_CASE("forward: probabilities are normalized and deterministic") {
  Rng rng(1);
  SigModelConfig cfg;
  cfg.input_dim = 3;
  cfg.aug_width = 2;
  cfg.depth = 2;
  cfg.classes = 3;
  auto params = SigModelParams::init(cfg, rng);
  CHECK(params.feature_size() == 2 + 4);  // a + a^2 for depth 2

  auto path = random_model_path(rng, 3, 5);
  auto p1 = forward(params, path);
  auto p2 = forward(params, path);
  REQUIRE(p1.size() == 3);
  double sum = std::accumulate(p1.begin(), p1.end(), 0.0);
  CHECK(std::abs(sum - 1.0) < 1e-9);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(p1[c] > 0.0);
    CHECK(p1[c] < 1.0);
    CHECK(p1[c] == p2[c]);  // bit-identical
  }
  PiecewiseLinearPath bad = random_model_path(rng, 4, 5);
  CHECK_THROWS_AS(forward(params, bad), std::invalid_argument);
}

TEST_CASE("backward: matches central finite differences on every parameter") {
  Rng rng(11);
  SigModelConfig cfg;
  cfg.input_dim = 3;
  cfg.aug_width = 2;
  cfg.depth = 2;
  cfg.classes = 3;
  auto params = SigModelParams::init(cfg, rng);
  auto path = random_model_path(rng, 3, 4);
  int label = 1;

  SigModelGrads grads(cfg);
  backward(params, path, label, grads);
  auto flat = flatten_grads(grads);

  const double h = 1e-5;
  double max_err = 0.0, max_abs = 0.0;
  SigModelGrads scratch(cfg);
  for (std::size_t i = 0; i < params.param_count(); ++i) {
    auto plus = params;
    auto minus = params;
    *param_entry(plus, i) += h;
    *param_entry(minus, i) -= h;
    scratch.zero();
    double lp = backward(plus, path, label, scratch);
    scratch.zero();
    double lm = backward(minus, path, label, scratch);
    double fd = (lp - lm) / (2.0 * h);
    max_err = std::max(max_err, std::abs(fd - flat[i]));
    max_abs = std::max(max_abs, std::abs(fd));
  }
  CHECK(max_err / std::max(max_abs, 1e-12) < 1e-3);
}

TEST_CASE("backward: zero output weights give uniform probabilities and p-y bias gradient") {
  Rng rng(3);
  SigModelConfig cfg;
  cfg.input_dim = 2;
  cfg.aug_width = 2;
  cfg.depth = 2;
  cfg.classes = 4;
  auto params = SigModelParams::init(cfg, rng);
  std::fill(params.w_out.begin(), params.w_out.end(), 0.0);
  std::fill(params.b_out.begin(), params.b_out.end(), 0.0);

  auto path = random_model_path(rng, 2, 4);
  auto probs = forward(params, path);
  for (double p : probs) CHECK(p == doctest::Approx(0.25));

  SigModelGrads grads(cfg);
  backward(params, path, 2, grads);
  for (int c = 0; c < 4; ++c) {
    double expect = probs[c] - (c == 2 ? 1.0 : 0.0);
    CHECK(grads.b_out[c] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("backward: confident correct prediction has a vanishing gradient") {
  Rng rng(9);
  SigModelConfig cfg;
  cfg.input_dim = 2;
  cfg.aug_width = 2;
  cfg.depth = 2;
  cfg.classes = 2;
  auto params = SigModelParams::init(cfg, rng);
  auto path = random_model_path(rng, 2, 4);

  double prev_norm = std::numeric_limits<double>::infinity();
  for (double boost : {4.0, 16.0, 48.0}) {
    auto biased = params;
    biased.b_out[0] = boost;  // push the true class odds toward 1
    SigModelGrads grads(cfg);
    backward(biased, path, 0, grads);
    auto flat = flatten_grads(grads);
    double norm = 0.0;
    for (double g : flat) norm += g * g;
    norm = std::sqrt(norm);
    CHECK(norm < prev_norm);
    prev_norm = norm;
  }
  CHECK(prev_norm < 1e-4);
}

TEST_CASE("adam_update: quadratic convergence and no-op cases") {
  SUBCASE("zero gradient, zero decay leaves parameters alone") {
    std::vector<double> p = {1.5, -2.0}, m(2, 0.0), v(2, 0.0), g(2, 0.0);
    adam_update(p, m, v, 1, g, 0.1, 0.0);
    CHECK(p[0] == 1.5);
    CHECK(p[1] == -2.0);
  }
  SUBCASE("minimizes x^2") {
    std::vector<double> x = {1.0}, m(1, 0.0), v(1, 0.0);
    for (long step = 1; step <= 500; ++step) {
      std::vector<double> g = {2.0 * x[0]};
      adam_update(x, m, v, step, g, 0.1, 0.0);
    }
    CHECK(std::abs(x[0]) < 1e-3);
  }
  SUBCASE("decay-only step shrinks the norm") {
    std::vector<double> p = {1.0, -3.0}, m(2, 0.0), v(2, 0.0), g(2, 0.0);
    adam_update(p, m, v, 1, g, 0.1, 0.01);
    CHECK(std::abs(p[0]) < 1.0);
    CHECK(std::abs(p[1]) < 3.0);
  }
  SUBCASE("non-finite gradient is an error") {
    std::vector<double> p = {1.0}, m(1, 0.0), v(1, 0.0);
    std::vector<double> g = {std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(adam_update(p, m, v, 1, g, 0.1, 0.0), std::runtime_error);
  }
}

TEST_CASE("parameter count: closed form and budget enforcement") {
  Rng rng(2);
  SigModelConfig cfg;
  cfg.input_dim = 3;
  cfg.aug_width = 4;
  cfg.depth = 3;
  cfg.classes = 5;
  auto params = SigModelParams::init(cfg, rng);
  std::size_t f = 4 + 16 + 64;
  std::size_t expect = 3 * 4 + (f * 30 + 30) + (30 * 30 + 30) + (30 * 5 + 5);
  CHECK(params.feature_size() == f);
  CHECK(params.param_count() == expect);

  SigModelConfig tiny = cfg;
  tiny.max_params = 100;
  CHECK_THROWS_AS(SigModelParams::init(tiny, rng), std::invalid_argument);
}

TEST_CASE("checkpoint JSON round-trip") {
  Rng rng(4);
  SigModelConfig cfg;
  cfg.input_dim = 2;
  cfg.aug_width = 3;
  cfg.depth = 2;
  cfg.classes = 2;
  auto params = SigModelParams::init(cfg, rng);
  auto text = params.to_json();
  auto back = SigModelParams::from_json(text);
  CHECK(back.aug == params.aug);
  CHECK(back.w1 == params.w1);
  CHECK(back.b_out == params.b_out);
  CHECK(back.cfg.depth == params.cfg.depth);
  CHECK(back.to_json() == text);
}

TEST_CASE("train: separable classes reach high training accuracy") {
  Rng rng(31);
  std::vector<PiecewiseLinearPath> train_paths, val_paths;
  std::vector<int> train_labels, val_labels;
  for (int i = 0; i < 40; ++i) {
    int label = i % 2;
    double a = label == 0 ? 0.0 : 1.0;
    double b = label == 0 ? 1.0 : 0.0;
    train_paths.push_back(line_path(a, b, 8, 0.05, rng));
    train_labels.push_back(label);
  }
  for (int i = 0; i < 10; ++i) {
    int label = i % 2;
    val_paths.push_back(line_path(label == 0 ? 0.0 : 1.0, label == 0 ? 1.0 : 0.0, 8, 0.05, rng));
    val_labels.push_back(label);
  }
  FixedPathSource train_src(train_paths, train_labels);
  FixedPathSource val_src(val_paths, val_labels);

  SigModelConfig cfg;
  cfg.input_dim = 2;
  cfg.aug_width = 2;
  cfg.depth = 2;
  cfg.classes = 2;
  TrainConfig tc;
  tc.lr = 1e-2;
  tc.weight_decay = 1e-4;
  tc.batch_size = 8;
  tc.max_epochs = 100;
  tc.patience = 20;
  tc.seed = 7;
  auto result = train(cfg, train_src, val_src, tc);

  std::size_t hits = 0;
  for (std::size_t i = 0; i < train_src.size(); ++i) {
    auto probs = predict_proba(result.best, train_src, i, 0);
    int pred = probs[1] > probs[0] ? 1 : 0;
    hits += pred == train_src.label(i);
  }
  CHECK(static_cast<double>(hits) / train_src.size() >= 0.99);
  for (double l : result.loss_trace) CHECK(std::isfinite(l));
}

TEST_CASE("train: flat validation metric triggers the patience stop") {
  Rng rng(13);
  std::vector<PiecewiseLinearPath> paths;
  std::vector<int> labels;
  for (int i = 0; i < 8; ++i) {
    paths.push_back(line_path(i % 2 ? 1.0 : 0.0, i % 2 ? 0.0 : 1.0, 6, 0.1, rng));
    labels.push_back(i % 2);
  }
  FixedPathSource src(paths, labels);
  SigModelConfig cfg;
  cfg.input_dim = 2;
  cfg.aug_width = 2;
  cfg.depth = 2;
  cfg.classes = 2;
  TrainConfig tc;
  tc.lr = 0.0;  // parameters never move, so the metric never improves
  tc.batch_size = 4;
  tc.max_epochs = 100;
  tc.patience = 20;
  tc.seed = 3;
  auto result = train(cfg, src, src, tc);
  CHECK(result.epochs_run == 21);
}

TEST_CASE("train: fixed seed gives identical parameters") {
  Rng rng(17);
  std::vector<PiecewiseLinearPath> paths;
  std::vector<int> labels;
  for (int i = 0; i < 12; ++i) {
    paths.push_back(line_path(i % 2 ? 1.0 : 0.0, i % 2 ? 0.0 : 1.0, 6, 0.1, rng));
    labels.push_back(i % 2);
  }
  FixedPathSource src(paths, labels);
  SigModelConfig cfg;
  cfg.input_dim = 2;
  cfg.aug_width = 2;
  cfg.depth = 2;
  cfg.classes = 2;
  TrainConfig tc;
  tc.lr = 5e-3;
  tc.batch_size = 4;
  tc.max_epochs = 10;
  tc.patience = 5;
  tc.seed = 11;
  auto a = train(cfg, src, src, tc);
  auto b = train(cfg, src, src, tc);
  CHECK(a.best.to_json() == b.best.to_json());
  CHECK(a.best_val_metric == b.best_val_metric);
}

}  // namespace sigpath

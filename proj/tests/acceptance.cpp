// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Criterion 11 is directional and
// logged without gating the exit code; everything else gates.
//
// Usage: acceptance [path-to-cli-binary]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gp.hpp"
#include "harness.hpp"
#include "imputation.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "signature.hpp"
#include "synth.hpp"
#include "timeseries.hpp"

using namespace sigpath;

namespace {

int g_failures = 0;

void report_line(int index, bool pass, const std::string& name, const std::string& detail,
                 bool gating = true) {
  std::printf("[%s] %2d. %s (%s)%s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str(), gating || pass ? "" : " [directional, non-gating]");
  if (!pass && gating) ++g_failures;
}

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PiecewiseLinearPath random_path(Rng& rng, std::size_t dim, std::size_t knots) {
  PiecewiseLinearPath p;
  p.dim = dim;
  double t = 0.0;
  for (std::size_t k = 0; k < knots; ++k) {
    t += 0.2 + rng.uniform();
    p.params.push_back(t);
    for (std::size_t c = 0; c < dim; ++c) p.values.push_back(rng.normal());
  }
  return p;
}

double max_abs_diff(const TruncatedSignature& a, const TruncatedSignature& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    m = std::max(m, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  }
  return m;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---- criteria -------------------------------------------------------------

void criterion_1_oracle_equivalence() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t dim = 1 + rng.below(3);
    std::size_t knots = 2 + rng.below(5);
    int depth = 1 + static_cast<int>(rng.below(4));
    auto p = random_path(rng, dim, knots);
    worst = std::max(worst, max_abs_diff(signature(p, depth), oracle_signature(p, depth, 10000)));
  }
  double secs = now_seconds(t0);
  report_line(1, worst < 1e-4 && secs < 5.0, "signature matches the quadrature oracle",
              "max err " + fmt(worst) + ", " + fmt(secs) + " s");
}

void criterion_2_chen_identity() {
  Rng rng(1002);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t dim = 1 + rng.below(3);
    auto p = random_path(rng, dim, 4 + rng.below(3));
    auto full = signature(p, 3);
    for (std::size_t m = 0; m < p.knots(); ++m) {
      PiecewiseLinearPath left, right;
      left.dim = right.dim = dim;
      left.params.assign(p.params.begin(), p.params.begin() + m + 1);
      left.values.assign(p.values.begin(), p.values.begin() + (m + 1) * dim);
      right.params.assign(p.params.begin() + m, p.params.end());
      right.values.assign(p.values.begin() + m * dim, p.values.end());
      worst = std::max(
          worst, max_abs_diff(chen_mul(signature(left, 3), signature(right, 3)), full));
    }
  }
  report_line(2, worst < 1e-12, "Chen identity holds at every split", "max err " + fmt(worst));
}

void criterion_3_reparameterisation() {
  Rng rng(1003);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t dim = 1 + rng.below(3);
    auto p = random_path(rng, dim, 4);
    auto sig = signature(p, 4);
    PiecewiseLinearPath split;
    split.dim = dim;
    for (std::size_t k = 0; k + 1 < p.knots(); ++k) {
      double frac = 0.2 + 0.6 * rng.uniform();
      split.params.push_back(p.params[k]);
      for (std::size_t c = 0; c < dim; ++c) split.values.push_back(p.value(k, c));
      split.params.push_back(p.params[k] + frac * (p.params[k + 1] - p.params[k]));
      for (std::size_t c = 0; c < dim; ++c) {
        split.values.push_back((1.0 - frac) * p.value(k, c) + frac * p.value(k + 1, c));
      }
    }
    split.params.push_back(p.params.back());
    for (std::size_t c = 0; c < dim; ++c) split.values.push_back(p.value(p.knots() - 1, c));
    worst = std::max(worst, max_abs_diff(sig, signature(split, 4)));
  }
  report_line(3, worst < 1e-12, "collinear knot insertion leaves the signature unchanged",
              "max err " + fmt(worst));
}

void criterion_4_fragile_dependence() {
  auto t0 = std::chrono::steady_clock::now();
  const double x11 = 1.0, x12 = 3.0, x21 = 2.0;
  IrregularTimeSeries base;
  base.id = "f";
  base.channels = 2;
  base.times = {0.0, 1.0};
  base.values = {x11, x12, x21, missing_value()};
  double base_area = levy_area(impute_forward_fill(base, {0.0, 1.0}), 0, 1);

  bool increasing = true;
  double prev = 0.0;
  for (int k = 1; k <= 10; ++k) {
    double tm = static_cast<double>(k) / 11.0;
    IrregularTimeSeries with_obs;
    with_obs.id = "f2";
    with_obs.channels = 2;
    with_obs.times = {0.0, tm, 1.0};
    with_obs.values = {x11, x12, missing_value(), 5.0, x21, missing_value()};
    double area = std::abs(levy_area(impute_forward_fill(with_obs, {0.0, tm, 1.0}), 0, 1));
    increasing = increasing && area > prev;
    prev = area;
  }
  double secs = now_seconds(t0);
  report_line(4, base_area == 0.0 && increasing && secs < 1.0,
              "forward-fill Levy area: zero without, growing with the unrelated observation",
              "base " + fmt(base_area) + ", final " + fmt(prev) + ", " + fmt(secs) + " s");
}

void criterion_5_causal_robustness() {
  // restricted to multi-indices over the (t, x1) channels
  auto restricted = [](const TruncatedSignature& sig) {
    std::vector<double> out;
    for (int k = 1; k <= sig.depth(); ++k) {
      auto lv = sig.level(k);
      for (std::size_t idx = 0; idx < lv.size(); ++idx) {
        std::size_t rest = idx;
        bool ok = true;
        for (int pos = 0; pos < k; ++pos) {
          ok = ok && (rest % sig.dim() <= 1);
          rest /= sig.dim();
        }
        if (ok) out.push_back(lv[idx]);
      }
    }
    return out;
  };

  IrregularTimeSeries base;
  base.id = "c";
  base.channels = 2;
  base.times = {0.0, 0.5, 1.0};
  base.values = {1.0, -1.0, 2.0, 0.5, 0.25, 1.5};
  auto ref = restricted(signature(impute_causal(base, base.times), 3));

  double worst = 0.0;
  for (double tm : {0.1, 0.3, 0.7, 0.9}) {
    IrregularTimeSeries with_obs;
    with_obs.id = "c2";
    with_obs.channels = 2;
    with_obs.times = {0.0, tm, 0.5, 1.0};
    with_obs.values = {1.0, -1.0, missing_value(), 9.0, 2.0, 0.5, 0.25, 1.5};
    if (tm > 0.5) {
      with_obs.times = {0.0, 0.5, tm, 1.0};
      with_obs.values = {1.0, -1.0, 2.0, 0.5, missing_value(), 9.0, 0.25, 1.5};
    }
    auto got = restricted(signature(impute_causal(with_obs, with_obs.times), 3));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      worst = std::max(worst, std::abs(ref[i] - got[i]));
    }
  }
  report_line(5, worst < 1e-10, "causal imputation ignores unrelated-channel insertions",
              "max err " + fmt(worst));
}

void criterion_6_gp_sanity() {
  bool ok = true;
  std::string detail;

  ChannelObservations obs{{0.2, 0.5, 0.9}, {1.0, -0.7, 0.3}};
  RbfHyperparams h{0.3, 1.0, 0.0};
  auto q = posterior(obs, h, obs.times);
  for (std::size_t i = 0; i < obs.times.size(); ++i) {
    ok = ok && std::abs(q.mean[i] - obs.values[i]) < 1e-6 && q.variance[i] <= 1e-8;
  }

  auto far = posterior(obs, h, {20.0});
  ok = ok && std::abs(far.mean[0]) < 1e-4 && std::abs(far.variance[0] - h.output_scale) < 1e-4;

  {
    ChannelObservations two{{0.0, 1.0}, {1.0, 2.0}};
    RbfHyperparams h2{0.8, 1.5, 0.1};
    double k01 = rbf_kernel(0.0, 1.0, h2);
    double a = h2.output_scale + h2.noise_variance;
    double det = a * a - k01 * k01;
    double inv00 = a / det, inv01 = -k01 / det;
    double alpha0 = inv00 * two.values[0] + inv01 * two.values[1];
    double alpha1 = inv01 * two.values[0] + inv00 * two.values[1];
    auto got = posterior(two, h2, {0.3});
    double k0 = rbf_kernel(0.3, 0.0, h2), k1 = rbf_kernel(0.3, 1.0, h2);
    double mean = k0 * alpha0 + k1 * alpha1;
    double var = h2.output_scale -
                 (k0 * (inv00 * k0 + inv01 * k1) + k1 * (inv01 * k0 + inv00 * k1));
    ok = ok && std::abs(got.mean[0] - mean) < 1e-10 && std::abs(got.variance[0] - var) < 1e-10;
  }

  try {
    ChannelObservations dup{{0.5, 0.5 + 1e-12}, {1.0, 1.0}};
    auto jq = posterior(dup, h, {0.25});
    ok = ok && std::isfinite(jq.mean[0]);
    detail = "interpolation, far field, closed form, jitter all within tolerance";
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("jittered solve failed: ") + e.what();
  }
  report_line(6, ok, "GP posterior sanity", detail);
}

void criterion_7_gradient_checks() {
  Rng rng(1007);
  double sig_rel = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    auto p = random_path(rng, 2, 4);
    TruncatedSignature upstream(2, 3);
    for (auto& v : upstream.coeffs()) v = rng.normal();
    auto grad = signature_backward(p, 3, upstream);
    auto objective = [&](const PiecewiseLinearPath& q) {
      auto s = signature(q, 3);
      double acc = 0.0;
      for (std::size_t i = 0; i < s.coeffs().size(); ++i) {
        acc += s.coeffs()[i] * upstream.coeffs()[i];
      }
      return acc;
    };
    const double h = 1e-5;
    double max_err = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      auto plus = p, minus = p;
      plus.values[i] += h;
      minus.values[i] -= h;
      double fd = (objective(plus) - objective(minus)) / (2.0 * h);
      max_err = std::max(max_err, std::abs(fd - grad[i]));
      max_abs = std::max(max_abs, std::abs(fd));
    }
    sig_rel = std::max(sig_rel, max_err / std::max(max_abs, 1e-12));
  }

  SigModelConfig cfg;
  cfg.input_dim = 3;
  cfg.aug_width = 2;
  cfg.depth = 2;
  cfg.classes = 3;
  auto params = SigModelParams::init(cfg, rng);
  auto path = random_path(rng, 3, 4);
  SigModelGrads grads(cfg);
  backward(params, path, 1, grads);
  std::vector<double> flat;
  for (const auto* v : {&grads.aug, &grads.w1, &grads.b1, &grads.w2, &grads.b2, &grads.w_out,
                        &grads.b_out}) {
    flat.insert(flat.end(), v->begin(), v->end());
  }
  std::vector<double>* blocks[] = {&params.aug, &params.w1, &params.b1, &params.w2,
                                   &params.b2,  &params.w_out, &params.b_out};
  const double h = 1e-5;
  double max_err = 0.0, max_abs = 0.0;
  std::size_t flat_index = 0;
  SigModelGrads scratch(cfg);
  for (auto* blk : blocks) {
    for (std::size_t i = 0; i < blk->size(); ++i, ++flat_index) {
      auto plus = params, minus = params;
      std::size_t off = 0;
      std::vector<double>* pblk[] = {&plus.aug, &plus.w1, &plus.b1, &plus.w2,
                                     &plus.b2,  &plus.w_out, &plus.b_out};
      std::vector<double>* mblk[] = {&minus.aug, &minus.w1, &minus.b1, &minus.w2,
                                     &minus.b2,  &minus.w_out, &minus.b_out};
      for (std::size_t b = 0; b < 7; ++b) {
        if (blk == blocks[b]) off = b;
      }
      (*pblk[off])[i] += h;
      (*mblk[off])[i] -= h;
      scratch.zero();
      double lp = backward(plus, path, 1, scratch);
      scratch.zero();
      double lm = backward(minus, path, 1, scratch);
      double fd = (lp - lm) / (2.0 * h);
      max_err = std::max(max_err, std::abs(fd - flat[flat_index]));
      max_abs = std::max(max_abs, std::abs(fd));
    }
  }
  double model_rel = max_err / std::max(max_abs, 1e-12);
  report_line(7, sig_rel < 1e-4 && model_rel < 1e-3, "reverse-mode gradients match differences",
              "signature rel " + fmt(sig_rel) + ", model rel " + fmt(model_rel));
}

void criterion_8_mc_consistency() {
  IrregularTimeSeries ts;
  ts.id = "m";
  ts.channels = 1;
  ts.times = {0.1, 0.4, 0.8};
  ts.values = {1.0, -0.5, 0.7};
  std::vector<RbfHyperparams> h = {{0.25, 1.0, 0.05}};
  GpPosterior post(ts, {}, h);
  std::vector<double> grid = {0.0, 0.2, 0.5, 1.0};
  auto mean = mean_path(post, grid);
  auto q = post.query(0, grid);

  Rng rng(2026);
  const std::size_t draws = 10000;
  std::vector<double> mean_hat(grid.size(), 0.0);
  for (auto& path : mc_sample(post, grid, draws, rng)) {
    for (std::size_t k = 0; k < grid.size(); ++k) mean_hat[k] += path.value(k, 1);
  }
  bool ok = true;
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    mean_hat[k] /= static_cast<double>(draws);
    double err = std::abs(mean_hat[k] - mean.value(k, 1));
    double bound = 3.0 * std::sqrt(q.variance[k]) / 100.0;
    ok = ok && err <= bound;
    worst = std::max(worst, bound > 0.0 ? err / bound : 0.0);
  }
  report_line(8, ok, "10^4 MC draws average to the posterior mean", "worst err/bound " + fmt(worst));
}

void criterion_9_metric_oracles() {
  bool ok = true;
  ok = ok && std::abs(balanced_accuracy({0, 0, 1, 1, 1}, {0, 1, 1, 1, 0}) - 7.0 / 12.0) < 1e-12;
  ok = ok && std::abs(auroc_binary({1, 0, 1, 0}, {0.9, 0.8, 0.7, 0.6}) - 0.75) < 1e-12;
  ok = ok && std::abs(average_precision({1, 0, 0, 0}, {0.1, 0.4, 0.3, 0.2}) - 0.25) < 1e-12;

  // pairwise comparison oracle
  Rng rng(1009);
  for (int rep = 0; rep < 100 && ok; ++rep) {
    std::size_t n = 2 + rng.below(10);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      s[i] = static_cast<double>(rng.below(5)) / 4.0;
    }
    double wins = 0.0;
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] == 0) continue;
      ++pos;
      for (std::size_t j = 0; j < n; ++j) {
        if (y[j] != 0) continue;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
    }
    neg = n - pos;
    double oracle = (pos == 0 || neg == 0) ? 0.5 : wins / (double(pos) * double(neg));
    ok = ok && std::abs(auroc_binary(y, s) - oracle) < 1e-12;
  }

  // a perfect classifier scores 1 everywhere
  std::vector<int> y = {0, 0, 1, 1, 2};
  std::vector<int> y_bin = {0, 0, 1, 1};
  std::vector<std::vector<double>> perfect = {
      {1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}};
  ok = ok && std::abs(accuracy(y, y) - 1.0) < 1e-12;
  ok = ok && std::abs(balanced_accuracy(y, y) - 1.0) < 1e-12;
  ok = ok && std::abs(weighted_auroc(y, perfect) - 1.0) < 1e-12;
  ok = ok && std::abs(auroc_binary(y_bin, {0.1, 0.2, 0.8, 0.9}) - 1.0) < 1e-12;
  ok = ok && std::abs(average_precision(y_bin, {0.1, 0.2, 0.8, 0.9}) - 1.0) < 1e-12;
  report_line(9, ok, "metrics match brute-force oracles and hand values", "tolerance 1e-12");
}

void criterion_10_end_to_end() {
  auto t0 = std::chrono::steady_clock::now();

  auto run_once = [&](std::uint64_t seed, std::string* params_json) {
    SynthSpec spec;
    spec.classes = 2;
    spec.channels = 2;
    spec.timesteps = 20;
    spec.train_per_class = 100;
    spec.test_per_class = 50;
    Rng gen(derive_seed(seed, "synth"));
    auto ds = synth_dataset(spec, gen);
    auto stats = fit_standardizer(ds);
    ds = apply_standardizer(ds, stats);
    std::vector<double> grid = ds.instances[0].times;

    std::vector<PiecewiseLinearPath> train_paths, val_paths, test_paths;
    std::vector<int> train_labels, val_labels, test_labels;
    std::size_t train_seen = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      auto path = impute(ds.instances[i], Imputation::Linear, grid);
      if (ds.splits[i] == Split::Test) {
        test_paths.push_back(std::move(path));
        test_labels.push_back(ds.labels[i]);
      } else if (++train_seen % 5 == 0) {  // every fifth training instance validates
        val_paths.push_back(std::move(path));
        val_labels.push_back(ds.labels[i]);
      } else {
        train_paths.push_back(std::move(path));
        train_labels.push_back(ds.labels[i]);
      }
    }
    FixedPathSource train_src(std::move(train_paths), std::move(train_labels));
    FixedPathSource val_src(std::move(val_paths), std::move(val_labels));
    FixedPathSource test_src(std::move(test_paths), std::move(test_labels));

    SigModelConfig cfg;
    cfg.input_dim = 3;
    cfg.aug_width = 3;
    cfg.depth = 2;
    cfg.classes = 2;
    TrainConfig tc;
    tc.lr = 3e-3;
    tc.weight_decay = 1e-4;
    tc.batch_size = 32;
    tc.max_epochs = 100;
    tc.patience = 20;
    tc.seed = derive_seed(seed, "fit");
    tc.metric = SelectionMetric::AveragePrecision;
    auto result = train(cfg, train_src, val_src, tc);
    if (params_json) *params_json = result.best.to_json();

    std::size_t hits = 0;
    for (std::size_t i = 0; i < test_src.size(); ++i) {
      auto probs = predict_proba(result.best, test_src, i, 0);
      hits += (probs[1] > probs[0] ? 1 : 0) == test_src.label(i);
    }
    return static_cast<double>(hits) / static_cast<double>(test_src.size());
  };

  std::string params_a, params_b;
  double acc = run_once(42, &params_a);
  double acc_again = run_once(42, &params_b);
  double secs = now_seconds(t0);
  bool ok = acc >= 0.95 && acc == acc_again && params_a == params_b && secs < 60.0;
  report_line(10, ok, "end-to-end learning on the clean synthetic task",
              "test acc " + fmt(acc) + ", deterministic " +
                  (params_a == params_b ? "yes" : "NO") + ", " + fmt(secs) + " s");
}

void criterion_11_qualitative_trend() {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig config;
  // five classes separated by curve shape, long enough for per-point dips to
  // bind; full protocol otherwise (20 search calls, 5 final fits)
  SynthSpec spec;
  spec.classes = 5;
  spec.channels = 2;
  spec.timesteps = 48;
  spec.train_per_class = 40;
  spec.test_per_class = 20;
  spec.noise_std = 0.25;
  spec.freq_class = 0.3;
  spec.phase_class = 0.5;
  config.dataset.name = "synthetic";
  config.dataset.synth = spec;
  config.subsampling.mode = SubsamplingConfig::Mode::Label;
  config.subsampling.lo = 0.4;
  config.subsampling.hi = 0.6;
  config.imputations = {Imputation::Zero, Imputation::Indicator, Imputation::GpPom};
  config.seed = 42;
  config.threads = 2;

  auto report = run_experiment(config);
  double bac_zero = 0.0, bac_indicator = 0.0, bac_pom = 0.0;
  for (const auto& s : report.strategies) {
    double mean = s.mean().at("balanced_accuracy");
    if (s.imputation == Imputation::Zero) bac_zero = mean;
    if (s.imputation == Imputation::Indicator) bac_indicator = mean;
    if (s.imputation == Imputation::GpPom) bac_pom = mean;
  }
  double secs = now_seconds(t0);
  bool ok = bac_pom > bac_zero && bac_indicator > bac_zero && secs < 1800.0;
  report_line(11, ok, "uncertainty-aware strategies beat zero imputation under label-based drops",
              "BAC zero " + fmt(bac_zero) + ", indicator " + fmt(bac_indicator) +
                  " (indicator>zero: " + (bac_indicator > bac_zero ? "yes" : "no") +
                  "), gp-pom " + fmt(bac_pom) + " (gp-pom>zero: " +
                  (bac_pom > bac_zero ? "yes" : "no") + "), " + fmt(secs) + " s",
              /*gating=*/false);
}

void criterion_12_cli_determinism(const char* cli) {
  if (!cli) {
    report_line(12, false, "CLI determinism", "no CLI binary path given");
    return;
  }
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "sigpath_acceptance";
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir);

  std::string config_path = (dir / "config.json").string();
  {
    std::ofstream out(config_path);
    out << R"({
      "dataset": {"name": "determinism", "synth": {"classes": 2, "channels": 2,
                   "timesteps": 10, "train_per_class": 10, "test_per_class": 5}},
      "imputations": ["zero", "gp-pom"],
      "search": {"calls": 2, "final_fits": 2, "max_epochs": 5, "patience": 3,
                 "depth_choices": [2], "aug_choices": [2], "batch_choices": [8]},
      "gp": {"iters": 10},
      "seed": 7
    })";
  }

  auto run = [&](const std::string& out_dir) {
    std::string cmd = std::string("\"") + cli + "\" run --config " + config_path + " --out " +
                      out_dir + " --quiet > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  int rc1 = run((dir / "run1").string());
  int rc2 = run((dir / "run2").string());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  };
  std::string a = slurp(dir / "run1" / "results.csv");
  std::string b = slurp(dir / "run2" / "results.csv");
  bool ok = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
  report_line(12, ok, "two CLI runs produce byte-identical results.csv",
              ok ? std::to_string(a.size()) + " bytes" : "outputs differ or run failed");
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  std::printf("acceptance criteria\n-------------------\n");
  criterion_1_oracle_equivalence();
  criterion_2_chen_identity();
  criterion_3_reparameterisation();
  criterion_4_fragile_dependence();
  criterion_5_causal_robustness();
  criterion_6_gp_sanity();
  criterion_7_gradient_checks();
  criterion_8_mc_consistency();
  criterion_9_metric_oracles();
  criterion_10_end_to_end();
  criterion_11_qualitative_trend();
  criterion_12_cli_determinism(cli);
  std::printf("-------------------\n%s\n", g_failures == 0 ? "all gating criteria passed"
                                                           : "GATING FAILURES PRESENT");
  return g_failures == 0 ? 0 : 1;
}

// sigpath CLI: run experiments, generate synthetic datasets and inspect
// signatures. Talks to the core exclusively through the C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sigpath/sigpath.h"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

[[noreturn]] void fail(const std::string& msg) {
  std::cerr << "sigpath: " << msg << "\n";
  std::exit(1);
}

void check(sigpath_status st) {
  if (st != SIGPATH_OK) fail(sigpath_last_error());
}

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { sigpath_string_free(s); }
};

int cmd_run(const std::string& config_path, const json& overrides, bool quiet) {
  json config = json::object();
  if (!config_path.empty()) config = json::parse(read_file(config_path));
  config.merge_patch(overrides);
  OwnedString report;
  check(sigpath_run_experiment(config.dump().c_str(), &report.s));
  if (!quiet) {
    json r = json::parse(report.s);
    for (const auto& s : r.at("strategies")) {
      std::cout << s.at("imputation").get<std::string>() << ":";
      for (const auto& [name, value] : s.at("mean").items()) {
        std::printf(" %s=%.4f", name.c_str(), value.get<double>());
      }
      std::cout << "\n";
    }
    if (config.contains("out_dir")) {
      std::cout << "report written to " << config.at("out_dir").get<std::string>() << "\n";
    }
  }
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, std::uint64_t seed) {
  std::string spec = spec_path.empty() ? "{}" : read_file(spec_path);
  sigpath_dataset* ds = nullptr;
  check(sigpath_dataset_synth(spec.c_str(), seed, &ds));
  std::filesystem::create_directories(out_dir);
  for (int split = 0; split <= 1; ++split) {
    OwnedString series, labels;
    check(sigpath_dataset_serialize(ds, split, &series.s, &labels.s));
    const char* tag = split == 0 ? "train" : "test";
    write_file(out_dir + "/" + tag + "_series.csv", series.s);
    write_file(out_dir + "/" + tag + "_labels.csv", labels.s);
  }
  sigpath_dataset_free(ds);
  std::cout << "wrote " << out_dir << "/{train,test}_{series,labels}.csv\n";
  return 0;
}

int cmd_sig(const std::string& input, const std::string& labels, int depth,
            const std::string& strategy, std::uint64_t seed) {
  sigpath_dataset* ds = nullptr;
  std::string series_text = read_file(input);
  std::string labels_text = labels.empty() ? "" : read_file(labels);
  check(sigpath_dataset_parse(series_text.c_str(), labels.empty() ? nullptr : labels_text.c_str(),
                              &ds));
  for (size_t i = 0; i < sigpath_dataset_size(ds); ++i) {
    OwnedString id;
    check(sigpath_dataset_instance_id(ds, i, &id.s));
    sigpath_path* path = nullptr;
    check(sigpath_dataset_impute(ds, i, strategy.c_str(), seed, &path));
    sigpath_signature* sig = nullptr;
    check(sigpath_signature_compute(path, depth, &sig));

    json levels = json::array();
    for (int k = 1; k <= depth; ++k) {
      std::vector<double> buf(sigpath_signature_level_size(sig, k));
      check(sigpath_signature_level(sig, k, buf.data(), buf.size()));
      levels.push_back(buf);
    }
    json line = {{"id", id.s},
                 {"dim", sigpath_signature_dim(sig)},
                 {"depth", depth},
                 {"imputation", strategy},
                 {"levels", levels}};
    std::cout << line.dump() << "\n";
    sigpath_signature_free(sig);
    sigpath_path_free(path);
  }
  sigpath_dataset_free(ds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truncated path signatures over imputed time-series paths"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sigpath_version()));

  // run
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  std::string config_path, dataset_path, labels_path, out_dir, subsampling;
  std::vector<std::string> imputations;
  double drop_fraction = -1.0;
  std::int64_t seed = -1;
  int depth = 0, gp_iters = -1, mc_samples = -1, search_calls = -1, final_fits = -1, threads = 0;
  double jitter_init = -1.0, grid_resolution = -1.0;
  bool quiet = false;
  run->add_option("--config", config_path, "experiment config JSON file");
  run->add_option("--dataset", dataset_path, "series CSV (overrides config)");
  run->add_option("--labels", labels_path, "labels CSV (overrides config)");
  run->add_option("--imputation", imputations,
                  "imputation strategies: linear, forward-fill, zero, indicator, causal, "
                  "gp-mean, gp-mc, gp-pom");
  run->add_option("--subsampling", subsampling, "subsampling mode: none, random, label")
      ->check(CLI::IsMember({"none", "random", "label"}));
  run->add_option("--drop-fraction", drop_fraction, "drop fraction for random subsampling");
  double sub_lo = -1.0, sub_hi = -1.0;
  run->add_option("--lo", sub_lo, "lower drop rate for label-based subsampling");
  run->add_option("--hi", sub_hi, "upper drop rate for label-based subsampling");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--depth", depth, "pin the signature depth");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--gp-iters", gp_iters, "GP marginal-likelihood ascent iterations");
  run->add_option("--mc-samples", mc_samples, "MC samples for the gp-mc strategy");
  run->add_option("--jitter-init", jitter_init, "first nonzero Cholesky jitter (x sigma^2)");
  run->add_option("--search-calls", search_calls, "hyperparameter search calls");
  run->add_option("--final-fits", final_fits, "final fits with the chosen hyperparameters");
  run->add_option("--grid-resolution", grid_resolution, "fixed grid resolution");
  run->add_option("--threads", threads, "worker threads");
  run->add_flag("--quiet", quiet, "suppress the summary printout");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset as long-format CSV");
  std::string spec_path, synth_out = "synth_data";
  std::uint64_t synth_seed = 0;
  synth->add_option("--spec", spec_path, "generator spec JSON file (defaults apply if omitted)");
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", synth_seed, "generator seed");

  // sig
  auto* sig = app.add_subcommand("sig", "print signatures of the series in a CSV file");
  std::string sig_input, sig_labels, sig_strategy = "linear";
  int sig_depth = 2;
  std::uint64_t sig_seed = 0;
  sig->add_option("--input", sig_input, "series CSV")->required();
  sig->add_option("--labels", sig_labels, "labels CSV (optional)");
  sig->add_option("--depth", sig_depth, "signature truncation depth");
  sig->add_option("--imputation", sig_strategy, "imputation strategy (default linear)");
  sig->add_option("--seed", sig_seed, "seed for gp-mc draws");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      json overrides = json::object();
      if (!dataset_path.empty()) overrides["dataset"]["series"] = dataset_path;
      if (!labels_path.empty()) overrides["dataset"]["labels"] = labels_path;
      if (!imputations.empty()) overrides["imputations"] = imputations;
      if (!subsampling.empty()) overrides["subsampling"]["mode"] = subsampling;
      if (drop_fraction >= 0.0) overrides["subsampling"]["drop_fraction"] = drop_fraction;
      if (sub_lo >= 0.0) overrides["subsampling"]["lo"] = sub_lo;
      if (sub_hi >= 0.0) overrides["subsampling"]["hi"] = sub_hi;
      if (seed >= 0) overrides["seed"] = static_cast<std::uint64_t>(seed);
      if (depth > 0) overrides["search"]["depth_choices"] = std::vector<int>{depth};
      if (!out_dir.empty()) overrides["out_dir"] = out_dir;
      if (gp_iters >= 0) overrides["gp"]["iters"] = gp_iters;
      if (mc_samples > 0) overrides["mc_samples"] = mc_samples;
      if (jitter_init > 0.0) overrides["gp"]["jitter_init"] = jitter_init;
      if (search_calls > 0) overrides["search"]["calls"] = search_calls;
      if (final_fits > 0) overrides["search"]["final_fits"] = final_fits;
      if (grid_resolution > 0.0) {
        overrides["grid"]["mode"] = "fixed";
        overrides["grid"]["resolution"] = grid_resolution;
      }
      if (threads > 0) overrides["threads"] = threads;
      return cmd_run(config_path, overrides, quiet);
    }
    if (synth->parsed()) return cmd_synth(spec_path, synth_out, synth_seed);
    if (sig->parsed()) return cmd_sig(sig_input, sig_labels, sig_depth, sig_strategy, sig_seed);
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return 0;
}

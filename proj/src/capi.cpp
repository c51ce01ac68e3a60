// extern "C" surface over the C++ core: opaque handles, status codes and a
// thread-local last-error message.

#include "sigpath/sigpath.h"

#include <cstring>
#include <memory>
#include <new>
#include <set>
#include <stdexcept>
#include <string>

#include "gp.hpp"
#include "harness.hpp"
#include "imputation.hpp"
#include "json.hpp"
#include "signature.hpp"
#include "synth.hpp"
#include "timeseries.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg ? msg : "unknown error"; }

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
sigpath_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    set_error(e.what());
    return SIGPATH_ERR_PARSE;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return SIGPATH_ERR_INVALID_ARGUMENT;
  } catch (const std::runtime_error& e) {
    set_error(e.what());
    std::string what = e.what();
    if (what.find("cannot open") != std::string::npos ||
        what.find("cannot write") != std::string::npos ||
        what.find("cannot create") != std::string::npos ||
        what.find("write failed") != std::string::npos) {
      return SIGPATH_ERR_IO;
    }
    return SIGPATH_ERR_NUMERIC;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return SIGPATH_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return SIGPATH_ERR_INTERNAL;
  }
}

sigpath_status require(bool cond, const char* msg) {
  if (cond) return SIGPATH_OK;
  set_error(msg);
  return SIGPATH_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct sigpath_dataset {
  sigpath::LabeledDataset ds;
};

struct sigpath_path {
  sigpath::PiecewiseLinearPath path;
};

struct sigpath_signature {
  sigpath::TruncatedSignature sig;
};

extern "C" {

const char* sigpath_version(void) { return "0.1.0"; }

const char* sigpath_last_error(void) { return g_last_error.c_str(); }

void sigpath_string_free(char* s) { delete[] s; }

sigpath_status sigpath_dataset_parse(const char* series_csv, const char* labels_csv,
                                     sigpath_dataset** out) {
  if (auto st = require(series_csv && out, "sigpath_dataset_parse: null argument")) return st;
  return guarded([&] {
    try {
      auto* handle = new sigpath_dataset{
          sigpath::parse_long_csv(series_csv, labels_csv ? labels_csv : "")};
      *out = handle;
      return SIGPATH_OK;
    } catch (const std::invalid_argument& e) {
      set_error(e.what());
      return SIGPATH_ERR_PARSE;
    }
  });
}

sigpath_status sigpath_dataset_synth(const char* spec_json, uint64_t seed, sigpath_dataset** out) {
  if (auto st = require(spec_json && out, "sigpath_dataset_synth: null argument")) return st;
  return guarded([&] {
    sigpath::SynthSpec spec = sigpath::SynthSpec::from_json(spec_json);
    sigpath::Rng rng(sigpath::derive_seed(seed, "synth"));
    *out = new sigpath_dataset{sigpath::synth_dataset(spec, rng)};
    return SIGPATH_OK;
  });
}

void sigpath_dataset_free(sigpath_dataset* ds) { delete ds; }

size_t sigpath_dataset_size(const sigpath_dataset* ds) { return ds ? ds->ds.size() : 0; }

size_t sigpath_dataset_channels(const sigpath_dataset* ds) { return ds ? ds->ds.channels() : 0; }

sigpath_status sigpath_dataset_instance_id(const sigpath_dataset* ds, size_t index, char** out) {
  if (auto st = require(ds && out, "sigpath_dataset_instance_id: null argument")) return st;
  if (auto st = require(index < ds->ds.size(), "sigpath_dataset_instance_id: index out of range")) {
    return st;
  }
  *out = dup_string(ds->ds.instances[index].id);
  return SIGPATH_OK;
}

sigpath_status sigpath_dataset_serialize(const sigpath_dataset* ds, int split, char** series_csv,
                                         char** labels_csv) {
  if (auto st = require(ds && series_csv && labels_csv,
                        "sigpath_dataset_serialize: null argument")) {
    return st;
  }
  if (auto st = require(split >= -1 && split <= 1, "sigpath_dataset_serialize: bad split")) {
    return st;
  }
  return guarded([&] {
    sigpath::LabeledDataset subset;
    subset.channel_names = ds->ds.channel_names;
    for (std::size_t i = 0; i < ds->ds.size(); ++i) {
      bool take = split == -1 ||
                  (split == 0 && ds->ds.splits[i] != sigpath::Split::Test) ||
                  (split == 1 && ds->ds.splits[i] == sigpath::Split::Test);
      if (!take) continue;
      subset.instances.push_back(ds->ds.instances[i]);
      subset.labels.push_back(ds->ds.labels[i]);
      subset.splits.push_back(ds->ds.splits[i]);
    }
    *series_csv = dup_string(sigpath::serialize_series_csv(subset));
    *labels_csv = dup_string(sigpath::serialize_labels_csv(subset));
    return SIGPATH_OK;
  });
}

sigpath_status sigpath_dataset_impute(const sigpath_dataset* ds, size_t index,
                                      const char* strategy, uint64_t seed, sigpath_path** out) {
  if (auto st = require(ds && strategy && out, "sigpath_dataset_impute: null argument")) return st;
  if (auto st = require(index < ds->ds.size(), "sigpath_dataset_impute: index out of range")) {
    return st;
  }
  return guarded([&] {
    sigpath::Imputation imp = sigpath::imputation_from_string(strategy);
    const auto& inst = ds->ds.instances[index];
    std::set<double> grid_set(inst.times.begin(), inst.times.end());
    std::vector<double> grid(grid_set.begin(), grid_set.end());
    sigpath::ImputeContext ctx;
    ctx.seed = seed;
    std::unique_ptr<sigpath::GpPosterior> post;
    if (imp == sigpath::Imputation::GpMean || imp == sigpath::Imputation::GpMc ||
        imp == sigpath::Imputation::GpPom) {
      post = std::make_unique<sigpath::GpPosterior>(inst);
      ctx.posterior = post.get();
    }
    *out = new sigpath_path{sigpath::impute(inst, imp, grid, ctx)};
    return SIGPATH_OK;
  });
}

sigpath_status sigpath_path_new(const double* params, const double* values, size_t knots,
                                size_t dim, sigpath_path** out) {
  if (auto st = require(params && values && out, "sigpath_path_new: null argument")) return st;
  return guarded([&] {
    sigpath::PiecewiseLinearPath p;
    p.dim = dim;
    p.params.assign(params, params + knots);
    p.values.assign(values, values + knots * dim);
    p.validate();
    *out = new sigpath_path{std::move(p)};
    return SIGPATH_OK;
  });
}

void sigpath_path_free(sigpath_path* p) { delete p; }

size_t sigpath_path_knots(const sigpath_path* p) { return p ? p->path.knots() : 0; }

size_t sigpath_path_dim(const sigpath_path* p) { return p ? p->path.dim : 0; }

sigpath_status sigpath_signature_compute(const sigpath_path* p, int depth,
                                         sigpath_signature** out) {
  if (auto st = require(p && out, "sigpath_signature_compute: null argument")) return st;
  return guarded([&] {
    *out = new sigpath_signature{sigpath::signature(p->path, depth)};
    return SIGPATH_OK;
  });
}

void sigpath_signature_free(sigpath_signature* s) { delete s; }

size_t sigpath_signature_dim(const sigpath_signature* s) { return s ? s->sig.dim() : 0; }

int sigpath_signature_depth(const sigpath_signature* s) { return s ? s->sig.depth() : 0; }

size_t sigpath_signature_level_size(const sigpath_signature* s, int level) {
  if (!s || level < 1 || level > s->sig.depth()) return 0;
  return s->sig.level_size(level);
}

sigpath_status sigpath_signature_level(const sigpath_signature* s, int level, double* out,
                                       size_t out_len) {
  if (auto st = require(s && out, "sigpath_signature_level: null argument")) return st;
  if (auto st = require(level >= 1 && level <= s->sig.depth(),
                        "sigpath_signature_level: level out of range")) {
    return st;
  }
  auto lv = s->sig.level(level);
  if (auto st = require(out_len >= lv.size(), "sigpath_signature_level: buffer too small")) {
    return st;
  }
  std::memcpy(out, lv.data(), lv.size() * sizeof(double));
  return SIGPATH_OK;
}

sigpath_status sigpath_levy_area(const sigpath_path* p, size_t channel_i, size_t channel_j,
                                 double* out) {
  if (auto st = require(p && out, "sigpath_levy_area: null argument")) return st;
  return guarded([&] {
    *out = sigpath::levy_area(p->path, channel_i, channel_j);
    return SIGPATH_OK;
  });
}

sigpath_status sigpath_run_experiment(const char* config_json, char** report_json_out) {
  if (auto st = require(config_json != nullptr, "sigpath_run_experiment: null config")) return st;
  return guarded([&] {
    sigpath::ExperimentConfig config = sigpath::ExperimentConfig::from_json(config_json);
    sigpath::MetricsReport report = sigpath::run_experiment(config);
    if (report_json_out) *report_json_out = dup_string(report.to_json());
    return SIGPATH_OK;
  });
}

}  // extern "C"

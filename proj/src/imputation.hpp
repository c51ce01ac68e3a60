// Path imputation: converts an irregular, partially observed time series
// into a piecewise-linear path ready for the signature. Non-GP strategies
// are deterministic preprocessing; GP strategies query a fitted posterior.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gp.hpp"
#include "signature.hpp"
#include "timeseries.hpp"

namespace sigpath {

enum class Imputation { Linear, ForwardFill, Zero, Indicator, Causal, GpMean, GpMc, GpPom };

Imputation imputation_from_string(std::string_view name);
const char* imputation_name(Imputation s);
const std::vector<Imputation>& all_imputations();

PiecewiseLinearPath impute_linear(const IrregularTimeSeries& ts, const std::vector<double>& grid);
PiecewiseLinearPath impute_forward_fill(const IrregularTimeSeries& ts,
                                        const std::vector<double>& grid);
PiecewiseLinearPath impute_zero(const IrregularTimeSeries& ts, const std::vector<double>& grid);

// value channels zero-imputed plus one binary observed/missing indicator per
// channel; data dimension doubles
PiecewiseLinearPath impute_indicator(const IrregularTimeSeries& ts,
                                     const std::vector<double>& grid);

// Omega expansion of a fully observed sequence: time is updated first, then
// the value, so the knot stream is (t1,x1),(t2,x1),(t2,x2),(t3,x2),...
// Time becomes channel 0 and the path parameter is the knot index.
PiecewiseLinearPath causal_transform(const std::vector<double>& times,
                                     const std::vector<double>& values, std::size_t dim);

// forward-fill data imputation composed with the Omega expansion
PiecewiseLinearPath impute_causal(const IrregularTimeSeries& ts, const std::vector<double>& grid);

struct ImputeContext {
  const GpPosterior* posterior = nullptr;  // required for GP strategies
  std::size_t mc_samples = 10;
  std::uint64_t seed = 0;  // seeds the single draw taken by Imputation::GpMc
};

// Dispatch; every returned path is time-augmented and ready for `signature`.
PiecewiseLinearPath impute(const IrregularTimeSeries& ts, Imputation strategy,
                           const std::vector<double>& grid, const ImputeContext& ctx = {});

// data dimension of the imputed path (excluding the time channel)
std::size_t imputed_data_dim(Imputation strategy, std::size_t channels);

}  // namespace sigpath

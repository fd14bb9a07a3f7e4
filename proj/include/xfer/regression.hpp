#pragma once

#include <string>
#include <vector>

#include "xfer/table.hpp"

namespace xfer {

struct FitResult {
  std::vector<std::string> predictor_names;
  std::vector<double> coefficients;
  double intercept = 0.0;
  double r_squared = 0.0;
  double f_statistic = 0.0;
  double p_value = 1.0;
  bool standardized = false;
  std::vector<double> fitted;
  std::size_t n = 0;
};

// Rows of `x` are observations; an intercept column is added internally.
// Solved by column-pivoted Householder QR.
FitResult ols(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
              std::vector<std::string> names = {});

enum class Response { TFB, TSB };

Response parse_response(const std::string& s);

// ln T ~ gap + width + ln(amount); predictors z-scored unless `standardize` is false.
FitResult fit_eq3(const std::vector<DatasetRow>& rows, Response response, bool standardize = true);

// Percent of the from-scratch error eliminated by fine-tuning.
double relative_error_reduction(double acc_scratch, double acc_finetune);

// Simple OLS of relative error reduction on ln T (or raw T when log_t is false).
FitResult significance_vs_performance(const std::vector<DatasetRow>& rows, Response variant, bool log_t = true);

// Population (divisor n) z-scores.
std::vector<double> zscore(const std::vector<double>& v);

}  // namespace xfer

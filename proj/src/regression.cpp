#include "xfer/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "xfer/error.hpp"
#include "xfer/special.hpp"

namespace xfer {

FitResult ols(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
              std::vector<std::string> names) {
  const std::size_t n = y.size();
  if (x.size() != n) throw InputError("predictor and response lengths differ");
  const std::size_t p = n ? x.front().size() : 0;
  if (p == 0) throw InputError("OLS needs at least one predictor");
  if (n < p + 2) throw InputError("OLS needs n >= p + 2 observations");
  for (const auto& row : x)
    if (row.size() != p) throw InputError("ragged predictor matrix");
  if (names.empty())
    for (std::size_t k = 0; k < p; ++k) names.push_back("x" + std::to_string(k + 1));
  if (names.size() != p) throw InputError("predictor name count differs from predictor count");

  Eigen::MatrixXd design(n, p + 1);
  Eigen::VectorXd response(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) design(i, k) = x[i][k];
    design(i, p) = 1.0;
    response(i) = y[i];
  }
  if (!design.allFinite() || !response.allFinite()) throw InputError("non-finite value in regression input");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(p + 1)) throw SingularError("predictor matrix is rank-deficient");
  const Eigen::VectorXd beta = qr.solve(response);
  const Eigen::VectorXd fitted = design * beta;

  FitResult fit;
  fit.n = n;
  fit.predictor_names = std::move(names);
  fit.coefficients.assign(beta.data(), beta.data() + p);
  fit.intercept = beta(p);
  fit.fitted.assign(fitted.data(), fitted.data() + n);

  const double mean_y = response.mean();
  const double sst = (response.array() - mean_y).square().sum();
  const double sse = (response - fitted).squaredNorm();
  if (sst <= 0.0) {
    fit.r_squared = 0.0;
    fit.f_statistic = 0.0;
    fit.p_value = 1.0;
    return fit;
  }
  fit.r_squared = std::clamp(1.0 - sse / sst, 0.0, 1.0);
  const double df_model = static_cast<double>(p);
  const double df_resid = static_cast<double>(n - p - 1);
  const double ssr = std::max(sst - sse, 0.0);
  if (sse <= std::numeric_limits<double>::min() * sst) {
    fit.f_statistic = std::numeric_limits<double>::max();
    fit.p_value = 0.0;
  } else {
    fit.f_statistic = (ssr / df_model) / (sse / df_resid);
    fit.p_value = f_distribution_sf(fit.f_statistic, df_model, df_resid);
  }
  return fit;
}

Response parse_response(const std::string& s) {
  if (s == "tfb" || s == "TFB" || s == "t_fb" || s == "FB") return Response::TFB;
  if (s == "tsb" || s == "TSB" || s == "t_sb" || s == "SB") return Response::TSB;
  throw InputError("response must be tfb or tsb, got '" + s + "'");
}

std::vector<double> zscore(const std::vector<double>& v) {
  if (v.empty()) return {};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size()));
  if (!(sd > 0.0)) throw SingularError("cannot z-score a constant predictor");
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back((x - mean) / sd);
  return out;
}

FitResult fit_eq3(const std::vector<DatasetRow>& rows, Response response, bool standardize) {
  if (rows.size() < 6) throw InputError("the three-factor fit needs at least 6 rows");
  std::vector<double> gap, width, log_amount, y;
  for (const auto& r : rows) {
    gap.push_back(r.gap);
    width.push_back(r.width);
    log_amount.push_back(std::log(r.amount));
    y.push_back(std::log(response == Response::TFB ? r.t_fb : r.t_sb));
  }
  if (standardize) {
    gap = zscore(gap);
    width = zscore(width);
    log_amount = zscore(log_amount);
  }
  std::vector<std::vector<double>> x;
  for (std::size_t i = 0; i < rows.size(); ++i) x.push_back({gap[i], width[i], log_amount[i]});
  FitResult fit = ols(x, y, {"gap", "width", "ln_amount"});
  fit.standardized = standardize;
  return fit;
}

double relative_error_reduction(double acc_scratch, double acc_finetune) {
  if (!(acc_scratch >= 0 && acc_scratch <= 100) || !(acc_finetune >= 0 && acc_finetune <= 100))
    throw InputError("accuracies must be percentages in [0,100]");
  if (acc_scratch == 100.0) throw InputError("from-scratch accuracy of 100% leaves no error to reduce");
  const double err_scratch = 100.0 - acc_scratch;
  const double err_finetune = 100.0 - acc_finetune;
  return 100.0 * (err_scratch - err_finetune) / err_scratch;
}

FitResult significance_vs_performance(const std::vector<DatasetRow>& rows, Response variant, bool log_t) {
  if (rows.size() < 4) throw InputError("the significance fit needs at least 4 rows");
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const auto& r : rows) {
    const double t = variant == Response::TFB ? r.t_fb : r.t_sb;
    x.push_back({log_t ? std::log(t) : t});
    y.push_back(relative_error_reduction(r.acc_scratch, r.acc_finetune));
  }
  return ols(x, y, {log_t ? "ln_T" : "T"});
}

}  // namespace xfer

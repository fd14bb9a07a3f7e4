#include <doctest.h>

#include <cmath>
#include <numbers>

#include "xfer/error.hpp"
#include "xfer/regression.hpp"
#include "xfer/rng.hpp"
#include "xfer/special.hpp"
#include "xfer/table.hpp"

using namespace xfer;

namespace {

// Composite Simpson on the beta density; only used with a, b >= 1 so the
// integrand is bounded.
double simpson_beta(double a, double b, double x, int n = 20000) {
  const auto f = [&](double t) { return std::pow(t, a - 1) * std::pow(1 - t, b - 1); };
  const auto integrate = [&](double hi) {
    const double h = hi / n;
    double s = f(0) + f(hi);
    for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
  };
  return integrate(x) / integrate(1.0);
}

std::vector<double> population_z(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= v.size();
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / v.size());
  std::vector<double> out;
  for (double x : v) out.push_back((x - m) / sd);
  return out;
}

}  // namespace

TEST_CASE("incomplete beta against numerical integration") {
  const double params[][3] = {{1, 1, 0.3}, {2, 3, 0.4}, {5, 2.5, 0.9}, {3, 7, 0.05}, {10, 10, 0.5}, {3, 2, 0.99}};
  for (const auto& p : params) CHECK(std::abs(incomplete_beta(p[0], p[1], p[2]) - simpson_beta(p[0], p[1], p[2])) < 1e-9);
  // Closed forms cover parameters below 1, where the integrand is unbounded.
  for (double a : {0.3, 0.7, 2.5})
    for (double x : {0.01, 0.4, 0.95}) {
      CHECK(std::abs(incomplete_beta(a, 1, x) - std::pow(x, a)) < 1e-12);
      CHECK(std::abs(incomplete_beta(1, a, x) - (1 - std::pow(1 - x, a))) < 1e-12);
    }
  CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
  CHECK_THROWS(incomplete_beta(-1, 3, 0.5));
}

TEST_CASE("F(1,1) tail has the closed form 1 - (2/pi) atan(sqrt F)") {
  for (double f : {0.1, 0.5, 1.0, 3.0, 10.0, 250.0}) {
    const double want = 1 - 2 / std::numbers::pi * std::atan(std::sqrt(f));
    CHECK(std::abs(f_distribution_sf(f, 1, 1) - want) < 1e-12);
  }
  CHECK(f_distribution_sf(0.0, 3, 8) == 1.0);
}

TEST_CASE("ols hand example") {
  const auto r = ols({{0}, {1}, {2}}, {0, 1, 1});
  CHECK(std::abs(r.coefficients[0] - 0.5) < 1e-9);
  CHECK(std::abs(r.intercept - 1.0 / 6) < 1e-9);
  CHECK(std::abs(r.r_squared - 0.75) < 1e-9);
  CHECK(std::abs(r.f_statistic - 3.0) < 1e-9);
  CHECK(std::abs(r.p_value - 1.0 / 3) < 1e-9);
  CHECK(r.n == 3);
}

TEST_CASE("ols exact interpolation and degenerate responses") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  CounterRng rng(6);
  for (int i = 0; i < 10; ++i) {
    const double a = rng.normal(), b = rng.normal();
    x.push_back({a, b});
    y.push_back(3 * a - 2 * b + 1);
  }
  const auto r = ols(x, y);
  CHECK(std::abs(r.coefficients[0] - 3) < 1e-10);
  CHECK(std::abs(r.coefficients[1] + 2) < 1e-10);
  CHECK(std::abs(r.intercept - 1) < 1e-10);
  CHECK(std::abs(r.r_squared - 1) < 1e-10);
  CHECK(r.p_value < 1e-10);

  const auto c = ols({{0}, {1}, {2}, {3}}, {2, 2, 2, 2});
  CHECK(c.r_squared == 0.0);
  CHECK(c.f_statistic == 0.0);
  CHECK(c.p_value == 1.0);

  CHECK_THROWS_AS(ols({{1, 2}, {2, 4}, {3, 6}, {4, 8}}, {1, 2, 3, 5}), SingularError);
  CHECK_THROWS_AS(ols({{1}, {2}}, {1, 2}), InputError);
}

TEST_CASE("population z-scores") {
  const auto z = zscore({1, 2, 3});
  CHECK(std::abs(z[0] + std::sqrt(1.5)) < 1e-12);
  CHECK(std::abs(z[1]) < 1e-12);
  CHECK_THROWS(zscore({4, 4, 4}));
}

TEST_CASE("planted three-factor model is recovered exactly") {
  const std::vector<double> g = {0.3, 1.2, 0.7, 2.0, 0.1, 1.5};
  const std::vector<double> w = {5.0, 3.0, 9.0, 4.0, 7.5, 6.0};
  const std::vector<double> n = {500, 40000, 3000, 120000, 1200, 9000};
  std::vector<double> lnn;
  for (double v : n) lnn.push_back(std::log(v));
  const auto zg = population_z(g), zw = population_z(w), zn = population_z(lnn);
  std::vector<DatasetRow> rows;
  for (std::size_t i = 0; i < 6; ++i) {
    DatasetRow r;
    r.name = "d" + std::to_string(i);
    r.gap = g[i];
    r.width = w[i];
    r.amount = n[i];
    r.t_fb = std::exp(2.86 - 0.02 * zg[i] - 0.14 * zw[i] - 0.80 * zn[i]);
    r.t_sb = r.t_fb;
    rows.push_back(r);
  }
  const auto fit = fit_eq3(rows, Response::TFB);
  CHECK(std::abs(fit.coefficients[0] + 0.02) < 1e-8);
  CHECK(std::abs(fit.coefficients[1] + 0.14) < 1e-8);
  CHECK(std::abs(fit.coefficients[2] + 0.80) < 1e-8);
  CHECK(std::abs(fit.intercept - 2.86) < 1e-8);
  CHECK(fit.standardized);
  rows.pop_back();
  CHECK_THROWS_AS(fit_eq3(rows, Response::TFB), InputError);
}

TEST_CASE("relative error reduction") {
  CHECK(std::abs(relative_error_reduction(84.9, 90.0) - 33.77483) < 1e-4);
  CHECK(std::round(relative_error_reduction(84.9, 90.0) * 10) / 10 == doctest::Approx(33.8));
  CHECK(std::round(relative_error_reduction(64.6, 94.6) * 10) / 10 == doctest::Approx(84.7));
  CHECK(relative_error_reduction(70, 70) == 0.0);
  CHECK_THROWS(relative_error_reduction(100, 100));
}

TEST_CASE("collinear significance toy") {
  std::vector<DatasetRow> rows;
  for (int i = 0; i < 6; ++i) {
    DatasetRow r;
    r.t_fb = 1.5 + i;
    // reduction = 10 ln T, with scratch accuracy 50
    const double red = 10 * std::log(r.t_fb);
    r.acc_scratch = 50;
    r.acc_finetune = 50 + red * 50 / 100;
    rows.push_back(r);
  }
  const auto fit = significance_vs_performance(rows, Response::TFB);
  CHECK(std::abs(fit.r_squared - 1) < 1e-10);
  CHECK(fit.p_value < 1e-10);
  CHECK(std::abs(fit.coefficients[0] - 10) < 1e-9);
}

TEST_CASE("table parsing") {
  const auto rows = parse_table(
      "name,gap,width,amount,acc_scratch,acc_finetune,t_fb,t_sb\n"
      "a,0.1,2,100,50,60,3,2\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].amount == 100);
  CHECK(rows[0].t_sb == 2);
  CHECK(parse_table(table_csv(rows))[0].acc_finetune == 60);
  CHECK_THROWS_AS(parse_table("name,gap\na,1\n"), InputError);
  CHECK_THROWS_AS(parse_table("name,gap,width,amount,acc_scratch,acc_finetune,t_fb,t_sb\na,x,2,100,50,60,3,2\n"),
                  InputError);
  CHECK_THROWS_AS(parse_table("name,gap,width,amount,acc_scratch,acc_finetune,t_fb,t_sb\na,0.1,2,100,50,60,-3,2\n"),
                  InputError);
}

TEST_CASE("response parsing") {
  CHECK(parse_response("tfb") == Response::TFB);
  CHECK(parse_response("tsb") == Response::TSB);
  CHECK_THROWS_AS(parse_response("x"), InputError);
}

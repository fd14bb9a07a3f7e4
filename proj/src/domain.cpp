#include "xfer/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xfer/error.hpp"

namespace xfer {
namespace {

std::size_t common_dim(const Samples& x, const Samples& y) {
  if (x.empty() || y.empty()) throw InputError("MMD needs at least one sample in each set");
  const std::size_t d = x.front().size();
  for (const auto* set : {&x, &y})
    for (const auto& v : *set)
      if (v.size() != d) throw InputError("feature dimension mismatch");
  return d;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double mean_kernel(const Samples& a, const Samples& b, double inv_two_sigma2) {
  double total = 0.0;
  for (const auto& u : a) {
    double row = 0.0;
    for (const auto& v : b) row += std::exp(-sq_dist(u, v) * inv_two_sigma2);
    total += row;
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

double median_bandwidth(const Samples& x, const Samples& y) {
  common_dim(x, y);
  Samples pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::vector<double> d;
  d.reserve(pooled.size() * (pooled.size() - 1) / 2);
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = i + 1; j < pooled.size(); ++j) d.push_back(std::sqrt(sq_dist(pooled[i], pooled[j])));
  if (d.empty()) return 1.0;
  std::sort(d.begin(), d.end());
  const std::size_t m = d.size() / 2;
  const double median = d.size() % 2 ? d[m] : 0.5 * (d[m - 1] + d[m]);
  return median > 0.0 ? median : 1.0;
}

MmdResult mmd(const Samples& x, const Samples& y, std::optional<double> bandwidth) {
  common_dim(x, y);
  const double sigma = bandwidth ? *bandwidth : median_bandwidth(x, y);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("MMD bandwidth must be positive");
  const double g = 1.0 / (2.0 * sigma * sigma);
  const double kxx = mean_kernel(x, x, g), kyy = mean_kernel(y, y, g), kxy = mean_kernel(x, y, g);
  double mmd2 = kxx + kyy - 2.0 * kxy;
  // Below the cancellation error of the three sums the sign and size of MMD^2
  // are noise; sqrt would inflate that noise to ~1e-8.
  if (mmd2 <= 16.0 * std::numeric_limits<double>::epsilon() * (kxx + kyy + 2.0 * kxy)) mmd2 = 0.0;
  return {std::sqrt(mmd2), sigma};
}

SquareMatrix covariance(const Samples& x) {
  if (x.empty()) throw InputError("covariance of an empty sample");
  const std::size_t d = x.front().size();
  for (const auto& v : x)
    if (v.size() != d) throw InputError("feature dimension mismatch");
  SquareMatrix c(d);
  const std::size_t n = x.size();
  if (n < 2) return c;
  std::vector<double> mean(d, 0.0);
  for (const auto& v : x)
    for (std::size_t k = 0; k < d; ++k) mean[k] += v[k];
  for (double& m : mean) m /= static_cast<double>(n);
  for (const auto& v : x)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) c(i, j) += (v[i] - mean[i]) * (v[j] - mean[j]);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      c(i, j) /= static_cast<double>(n - 1);
      c(j, i) = c(i, j);
    }
  return c;
}

std::vector<double> jacobi_eigenvalues(const SquareMatrix& m) {
  const std::size_t n = m.n;
  if (n == 0 || m.a.size() != n * n) throw InputError("eigenvalues of an empty matrix");
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(m(i, j))) throw InputError("matrix has non-finite entries");
      if (std::fabs(m(i, j) - m(j, i)) > 1e-9) throw InputError("matrix is not symmetric");
      norm2 += m(i, j) * m(i, j);
    }
  SquareMatrix a = m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);

  const double tol = 1e-12 * std::sqrt(norm2);
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() >= tol && norm2 > 0.0; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing a(p,q); t is the smaller root of t^2 + 2*theta*t - 1.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }
  if (off_norm() >= tol && norm2 > 0.0) throw NumericsError("Jacobi eigenvalue iteration did not converge");
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double max_eigenvalue(const SquareMatrix& m) { return jacobi_eigenvalues(m).back(); }

Samples to_samples(const DatasetProfile& profile) {
  Samples s;
  s.reserve(profile.features.size());
  for (const auto& f : profile.features) s.emplace_back(f.begin(), f.end());
  return s;
}

void standardize(std::vector<Samples*> sets) {
  std::size_t n = 0, d = 0;
  for (const Samples* s : sets) {
    n += s->size();
    if (!s->empty()) d = s->front().size();
  }
  if (n == 0) return;
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (const Samples* s : sets)
    for (const auto& v : *s)
      for (std::size_t k = 0; k < d; ++k) mean[k] += v[k];
  for (double& m : mean) m /= static_cast<double>(n);
  for (const Samples* s : sets)
    for (const auto& v : *s)
      for (std::size_t k = 0; k < d; ++k) sd[k] += (v[k] - mean[k]) * (v[k] - mean[k]);
  for (double& v : sd) v = std::sqrt(v / static_cast<double>(n));
  for (Samples* s : sets)
    for (auto& v : *s)
      for (std::size_t k = 0; k < d; ++k) v[k] = sd[k] > 0.0 ? (v[k] - mean[k]) / sd[k] : v[k] - mean[k];
}

double domain_width(const DatasetProfile& profile, bool standardized) {
  if (profile.features.empty()) throw InputError("domain width of an empty profile");
  Samples s = to_samples(profile);
  if (standardized) standardize({&s});
  return std::max(0.0, max_eigenvalue(covariance(s)));
}

DomainMetrics domain_metrics(const DatasetProfile& target, const DatasetProfile& reference,
                             std::optional<double> bandwidth, bool standardized) {
  Samples x = to_samples(target);
  Samples y = to_samples(reference);
  if (standardized) standardize({&x, &y});
  const auto gap = mmd(x, y, bandwidth);
  DomainMetrics m;
  m.gap = gap.mmd;
  m.bandwidth = gap.bandwidth;
  m.width = domain_width(target, standardized);
  m.amount = std::max<std::size_t>(target.source_count, 1);
  m.reference = reference.name;
  return m;
}

}  // namespace xfer

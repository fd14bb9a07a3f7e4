#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "xfer/features.hpp"

namespace xfer {

using Samples = std::vector<std::vector<double>>;

// Dense square matrix, row-major.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// Median of all pooled pairwise Euclidean distances; 1.0 if that median is 0.
double median_bandwidth(const Samples& x, const Samples& y);

struct MmdResult {
  double mmd = 0.0;
  double bandwidth = 0.0;
};

// Biased (V-statistic) Gaussian-kernel MMD, sqrt(max(MMD^2, 0)).
// With no bandwidth the median heuristic is used.
MmdResult mmd(const Samples& x, const Samples& y, std::optional<double> bandwidth = std::nullopt);

// Sample covariance (n-1 divisor); zero matrix for a single sample.
SquareMatrix covariance(const Samples& x);

// Largest eigenvalue by cyclic Jacobi rotations.
double max_eigenvalue(const SquareMatrix& m);
// All eigenvalues, ascending.
std::vector<double> jacobi_eigenvalues(const SquareMatrix& m);

Samples to_samples(const DatasetProfile& profile);

// Per-dimension z-scoring with statistics pooled over all given sets.
// Dimensions with zero spread are only centered.
void standardize(std::vector<Samples*> sets);

double domain_width(const DatasetProfile& profile, bool standardized = false);

struct DomainMetrics {
  double gap = 0.0;
  double width = 0.0;
  std::size_t amount = 0;
  std::string reference;
  double bandwidth = 0.0;
};

// Gap of `target` against `reference`, width and amount of `target`.
DomainMetrics domain_metrics(const DatasetProfile& target, const DatasetProfile& reference,
                             std::optional<double> bandwidth = std::nullopt, bool standardized = false);

}  // namespace xfer

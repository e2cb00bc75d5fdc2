#pragma once

// Direct solvers for the 1D assemblies: a tridiagonal (Thomas) solver for the
// scalar substeps and a general banded LU with partial pivoting for the
// monolithic coupled step of the linearized scheme.

#include <vector>

#include "kwc/errors.hpp"

namespace kwc {

struct Tridiag {
  // lower[i] couples row i to i-1 (lower[0] unused), upper[i] couples row i to i+1.
  std::vector<double> lower, diag, upper;

  explicit Tridiag(int n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
  int size() const { return static_cast<int>(diag.size()); }

  void add(const Tridiag& other, double scale = 1.0);
  std::vector<double> apply(const std::vector<double>& x) const;

  // Thomas algorithm; pivot-free, intended for the SPD/M-matrix assemblies here.
  std::vector<double> solve(std::vector<double> rhs) const;
};

// Row-major banded storage: entry (i,j) with |i-j| <= band lives at
// data[i][j - i + band]. LU with partial pivoting grows the upper band by kl.
class BandMatrix {
 public:
  BandMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  double& at(int i, int j);
  double get(int i, int j) const;
  void add(int i, int j, double v) { at(i, j) += v; }

  // in-place factor + solve; throws StepFailure-style runtime_error on
  // vanishing pivot, reporting a crude condition estimate
  std::vector<double> solve(std::vector<double> rhs);

 private:
  int n_, kl_, ku_;
  int width_;
  std::vector<double> data_;  // n rows of width (kl + kl + ku + 1)
  double& slot(int i, int j) { return data_[static_cast<std::size_t>(i) * width_ + (j - i + kl_ + ku_)]; }
};

}  // namespace kwc

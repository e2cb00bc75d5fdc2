#include "kwc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kwc {

void Tridiag::add(const Tridiag& other, double scale) {
  if (other.size() != size()) throw DimensionError("Tridiag::add: size mismatch");
  for (int i = 0; i < size(); ++i) {
    lower[i] += scale * other.lower[i];
    diag[i] += scale * other.diag[i];
    upper[i] += scale * other.upper[i];
  }
}

std::vector<double> Tridiag::apply(const std::vector<double>& x) const {
  const int n = size();
  if (static_cast<int>(x.size()) != n) throw DimensionError("Tridiag::apply: size mismatch");
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += lower[i] * x[i - 1];
    if (i + 1 < n) v += upper[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

std::vector<double> Tridiag::solve(std::vector<double> rhs) const {
  const int n = size();
  if (static_cast<int>(rhs.size()) != n) throw DimensionError("Tridiag::solve: size mismatch");
  std::vector<double> c(n, 0.0);
  double piv = diag[0];
  if (piv == 0.0) throw std::runtime_error("Tridiag::solve: zero pivot at row 0");
  c[0] = upper[0] / piv;
  rhs[0] /= piv;
  for (int i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * c[i - 1];
    if (piv == 0.0) throw std::runtime_error("Tridiag::solve: zero pivot at row " + std::to_string(i));
    c[i] = upper[i] / piv;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / piv;
  }
  for (int i = n - 2; i >= 0; --i) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

BandMatrix::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), data_(static_cast<std::size_t>(n) * width_, 0.0) {}

double& BandMatrix::at(int i, int j) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || j - i > ku_ || i - j > kl_)
    throw DimensionError("BandMatrix::at: index outside band");
  return slot(i, j);
}

double BandMatrix::get(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || j - i > ku_ + kl_ || i - j > kl_) return 0.0;
  return data_[static_cast<std::size_t>(i) * width_ + (j - i + kl_ + ku_)];
}

std::vector<double> BandMatrix::solve(std::vector<double> rhs) {
  if (static_cast<int>(rhs.size()) != n_) throw DimensionError("BandMatrix::solve: size mismatch");
  const int ubw = kl_ + ku_;  // upper bandwidth after pivoting
  double max_piv = 0.0, min_piv = std::numeric_limits<double>::infinity();

  for (int k = 0; k < n_; ++k) {
    int piv_row = k;
    double piv_val = std::abs(slot(k, k));
    for (int i = k + 1; i <= std::min(k + kl_, n_ - 1); ++i) {
      double v = std::abs(data_[static_cast<std::size_t>(i) * width_ + (k - i + kl_ + ku_)]);
      if (v > piv_val) {
        piv_val = v;
        piv_row = i;
      }
    }
    if (piv_val == 0.0)
      throw std::runtime_error("BandMatrix::solve: singular matrix at column " + std::to_string(k));
    if (piv_row != k) {
      for (int j = k; j <= std::min(k + ubw, n_ - 1); ++j) {
        double& a = data_[static_cast<std::size_t>(k) * width_ + (j - k + kl_ + ku_)];
        double& b = data_[static_cast<std::size_t>(piv_row) * width_ + (j - piv_row + kl_ + ku_)];
        std::swap(a, b);
      }
      std::swap(rhs[k], rhs[piv_row]);
    }
    const double pivot = slot(k, k);
    max_piv = std::max(max_piv, std::abs(pivot));
    min_piv = std::min(min_piv, std::abs(pivot));
    for (int i = k + 1; i <= std::min(k + kl_, n_ - 1); ++i) {
      double& lik = data_[static_cast<std::size_t>(i) * width_ + (k - i + kl_ + ku_)];
      const double m = lik / pivot;
      if (m == 0.0) continue;
      lik = 0.0;
      for (int j = k + 1; j <= std::min(k + ubw, n_ - 1); ++j)
        data_[static_cast<std::size_t>(i) * width_ + (j - i + kl_ + ku_)] -=
            m * data_[static_cast<std::size_t>(k) * width_ + (j - k + kl_ + ku_)];
      rhs[i] -= m * rhs[k];
    }
  }

  if (min_piv < 1e-300 * max_piv)
    throw std::runtime_error("BandMatrix::solve: ill-conditioned, pivot ratio " +
                             std::to_string(min_piv / max_piv));

  for (int i = n_ - 1; i >= 0; --i) {
    double v = rhs[i];
    for (int j = i + 1; j <= std::min(i + ubw, n_ - 1); ++j)
      v -= data_[static_cast<std::size_t>(i) * width_ + (j - i + kl_ + ku_)] * rhs[j];
    rhs[i] = v / slot(i, i);
  }
  return rhs;
}

}  // namespace kwc

#pragma once

// Uniform P1 mesh on Omega = (0,1) with boundary Gamma = {0,1}, and the
// implicit-Euler time grid t_i = i*tau with (N-1)*tau < T <= N*tau.

#include <cmath>
#include <string>

#include "kwc/errors.hpp"

namespace kwc {

struct Mesh1D {
  int n_cells = 0;
  double h = 0.0;

  explicit Mesh1D(int cells) : n_cells(cells), h(1.0 / cells) {
    if (cells < 2) throw ConfigError("Mesh1D: n_cells must be >= 2, got " + std::to_string(cells));
  }

  int n_nodes() const { return n_cells + 1; }
  int n_interior() const { return n_cells - 1; }
  double node(int j) const { return static_cast<double>(j) * h; }
  double mid(int c) const { return (static_cast<double>(c) + 0.5) * h; }

  // outward normal sign at boundary node ell in {0,1}: n_Gamma(ell) = (-1)^(ell-1)
  static double n_gamma(int ell) { return ell == 0 ? -1.0 : 1.0; }
};

struct TimeGrid {
  double T = 0.0;    // requested final time
  double tau = 0.0;  // step size, in (0,1)
  int steps = 0;     // N: smallest integer with N*tau >= T

  static TimeGrid with_tau(double T, double tau) {
    if (!(T > 0.0)) throw ConfigError("TimeGrid: T must be positive");
    if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("TimeGrid: tau must lie in (0,1)");
    TimeGrid g;
    g.T = T;
    g.tau = tau;
    g.steps = static_cast<int>(std::ceil(T / tau - 1e-12));
    if (g.steps < 1) g.steps = 1;
    return g;
  }

  static TimeGrid with_steps(double T, int n_steps) {
    if (n_steps < 1) throw ConfigError("TimeGrid: steps must be >= 1");
    return with_tau(T, T / n_steps);
  }

  double t(int i) const { return static_cast<double>(i) * tau; }
  // end of the discrete grid; equals T when tau divides T
  double t_end() const { return static_cast<double>(steps) * tau; }
  int n_nodes() const { return steps + 1; }
};

}  // namespace kwc

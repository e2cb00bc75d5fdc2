#pragma once

// Problem description shared by the state, adjoint and optimization layers:
// weights of the tracking cost, target profiles, and solver tolerances.

#include <vector>

#include "kwc/fields.hpp"
#include "kwc/material.hpp"
#include "kwc/mesh.hpp"
#include "kwc/regularization.hpp"
#include "kwc/spaces.hpp"

namespace kwc {

struct Weights {
  double K = 0.0, K_Gamma = 0.0, Lambda = 0.0;
  double L = 0.0, L_Gamma = 0.0, M = 0.0;

  void check() const {
    const double vals[] = {K, K_Gamma, Lambda, L, L_Gamma, M};
    for (double v : vals)
      if (!(v >= 0.0)) throw ConfigError("cost weights must be nonnegative");
  }
};

// admissible target profile [eta_ad, eta_Gamma_ad, theta_ad] sampled per time node
struct TargetTriple {
  std::vector<Vec> eta_ad;
  std::vector<BoundaryPair> eta_Gamma_ad;
  std::vector<Vec> theta_ad;

  static TargetTriple zero(const Mesh1D& mesh, const TimeGrid& tg) {
    TargetTriple t;
    t.eta_ad.assign(tg.n_nodes(), Vec(mesh.n_nodes(), 0.0));
    t.eta_Gamma_ad.assign(tg.n_nodes(), BoundaryPair{});
    t.theta_ad.assign(tg.n_nodes(), Vec(mesh.n_nodes(), 0.0));
    return t;
  }
};

struct SolverParams {
  int newton_max_iter = 50;
  double newton_tol = 1e-10;      // absolute residual tolerance, lumped-mass norm
  double eps_smoothing_floor = 1e-12;  // internal smoothing floor of the eps = 0 theta step
  int vi_check_directions = 8;    // a-posteriori VI certificate directions at eps = 0
  double vi_tol = 1e-7;
  bool record_energy = true;
};

struct ProblemConfig {
  Mesh1D mesh{2};
  TimeGrid time;
  double nu = 1.0;
  Epsilon eps{0.0};
  Weights weights;
  TargetTriple targets;
  MaterialModel material;
  MassKind mass = MassKind::lumped;
  SolverParams solver;

  void check() const {
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
    weights.check();
  }
};

}  // namespace kwc

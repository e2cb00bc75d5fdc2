#pragma once

// The linear system (P): a heat-type equation for [p, p_Gamma] with dynamic
// boundary rows, coupled through a cellwise coefficient omega to a weighted
// diffusion equation for z with Dirichlet data. One implicit step solves the
// monolithic banded system for (p, p_Gamma, z); the step is uniquely solvable
// for tau below tau0 and the trajectory obeys the a-priori bounds with the
// constants C0*, C1*, C2* checked by check_apriori.

#include <string>
#include <vector>

#include "kwc/fields.hpp"
#include "kwc/mesh.hpp"
#include "kwc/spaces.hpp"

namespace kwc {

// [a, b, mu, omega, A] sampled per time node; a, b, mu nodal, omega and A
// cellwise (they only ever multiply cell gradients). Declared norms feed the
// estimate constants; delta_star_a is the no-degeneration bound of a.
struct CoefficientQuintet {
  std::vector<Vec> a, b, mu;      // nodal, per time node
  std::vector<Vec> omega, A;      // cellwise, per time node
  double a_W1inf = 0.0;
  double b_inf = 0.0;
  double mu_LinfH = 0.0;
  double omega_inf = 0.0;
  double A_inf = 0.0;
  double delta_star_a = 0.0;

  void check(const Mesh1D& mesh, int n_time_nodes) const;
  // recompute the sampled norms (keeps declared a_W1inf, which needs time derivatives)
  void measure(const Mesh1D& mesh, MassKind mass);
};

struct ForcingTriple {
  std::vector<Vec> h;               // nodal
  std::vector<BoundaryPair> h_Gamma;
  std::vector<GridFn0> k;           // V0* loads via the H pairing
  // optional distributional part dx(F) with F cellwise, assembled by moving
  // dx onto the test functions: <dx F, psi> = -(F, dx psi); empty when unused
  std::vector<Vec> k_flux;

  static ForcingTriple zero(const Mesh1D& mesh, int n_time_nodes) {
    ForcingTriple f;
    f.h.assign(n_time_nodes, Vec(mesh.n_nodes(), 0.0));
    f.h_Gamma.assign(n_time_nodes, BoundaryPair{});
    f.k.assign(n_time_nodes, GridFn0(mesh));
    return f;
  }
};

// interior load vector of the combined V0* forcing (H density + flux part)
Vec k_load(const Mesh1D& mesh, MassKind mass, const GridFn0& k_density, const Vec* flux_cells);

struct LinearTriple {
  BulkBoundaryFn p;
  GridFn0 z;
};

struct StepNorms {
  double p_X_sq = 0.0;        // |p_i|_X^2
  double az_H_sq = 0.0;       // |sqrt(a_i) z_i|_H^2
  double p_W_sq = 0.0;        // |p_i|_W^2
  double z_V0_sq = 0.0;       // |z_i|_V0^2
  double dp_X_sq = 0.0;       // |p_i - p_{i-1}|_X^2
  double h_X_sq = 0.0;        // |h_i|_X^2
  double k_dual_sq = 0.0;     // |k_i|_{V0*}^2
  double grad_p_sq = 0.0;     // |dx p_i|_H^2
  double dz_dual_sq = 0.0;    // |M(z_i - z_{i-1})|_{V0*}^2
};

struct LinearTrajectory {
  std::vector<LinearTriple> states;  // t_0 .. t_N
  std::vector<StepNorms> norms;      // per node (entry 0 partial)
  std::vector<std::string> warnings;
  int steps = 0;
};

struct EstimateConstants {
  double tau0 = 0.0;
  double C0 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
};

// tau0 = min{1, nu^2, delta*(a)} / (16 (1 + |b| + |mu|^2 + |omega|^2))
double tau0(const CoefficientQuintet& q, double nu);
EstimateConstants constants(const CoefficientQuintet& q, double nu, double T);

// one implicit step; warns for tau in [tau0, 2 tau0), refuses tau >= 2 tau0
LinearTriple solve_step(const LinearTriple& prev, const Vec& a_i, const Vec& b_i, const Vec& mu_i,
                        const Vec& omega_i, const Vec& A_i, const Vec& h_i,
                        const BoundaryPair& hG_i, const GridFn0& k_i, double tau, double nu,
                        const Mesh1D& mesh, MassKind mass, double tau0_value, int step_index,
                        std::vector<std::string>* warnings = nullptr,
                        const Vec* k_flux_i = nullptr);

LinearTrajectory solve_P(const LinearTriple& init, const CoefficientQuintet& q,
                         const ForcingTriple& forcing, const Mesh1D& mesh, const TimeGrid& tg,
                         double nu, MassKind mass = MassKind::lumped);

struct AprioriReport {
  bool step_energy_ok = true;        // per-step energy inequality with C0*
  double step_energy_margin = 0.0;   // min over steps of RHS - LHS
  bool step_increment_ok = true;       // per-step increment inequality
  double step_increment_margin = 0.0;
  bool integrated_ok = true;     // integrated Gronwall bound
  double integrated_margin = 0.0;
  bool dt_bounds_ok = true;      // |dt p|^2 and |dt z|^2 bounds with C1*, C2*
  double dt_p_margin = 0.0;
  double dt_z_margin = 0.0;
};

AprioriReport check_apriori(const LinearTrajectory& traj, const LinearTriple& init,
                            const CoefficientQuintet& q, const EstimateConstants& consts,
                            const Mesh1D& mesh, const TimeGrid& tg, double nu, MassKind mass);

}  // namespace kwc

#pragma once

// Semi-implicit time marching for the state system: an Allen-Cahn type
// equation for the order parameter eta with a dynamic boundary condition,
// coupled to a regularized total-variation diffusion for the orientation
// angle theta with homogeneous Dirichlet data. Each step solves the
// Euler-Lagrange system of a convex per-step functional: first the eta
// substep with theta frozen at the previous node, then the theta substep
// with the fresh eta.

#include <optional>
#include <string>
#include <vector>

#include "kwc/problem.hpp"

namespace kwc {

struct StateTriple {
  BulkBoundaryFn eta;
  GridFn0 theta;
};

// forcing triplet [u, u_Gamma, v] on the full time grid; node 0 is carried for
// shape uniformity but never enters the scheme or the cost
struct ControlTriple {
  std::vector<Vec> u;
  std::vector<BoundaryPair> u_Gamma;
  std::vector<Vec> v;

  static ControlTriple zero(const Mesh1D& mesh, const TimeGrid& tg) {
    ControlTriple c;
    c.u.assign(tg.n_nodes(), Vec(mesh.n_nodes(), 0.0));
    c.u_Gamma.assign(tg.n_nodes(), BoundaryPair{});
    c.v.assign(tg.n_nodes(), Vec(mesh.n_nodes(), 0.0));
    return c;
  }
};

struct EnergyRecord {
  double phi = 0.0;          // Phi_eps^R at the node
  double ghat = 0.0;         // potential G-hat^R at the node
  double work = 0.0;         // forcing work rate over the step
  double dissipation = 0.0;  // |A^(1/2) dt w|^2 over the step
};

struct StateTrajectory {
  std::vector<StateTriple> states;  // t_0 .. t_N
  std::vector<EnergyRecord> energy;
  std::vector<double> theta_vi_residual;  // eps = 0 certificate per step (0 when eps > 0)
  std::vector<std::string> warnings;
  int steps = 0;
};

// R0 = 1 + 2 |alpha|^2 / nu^2 with |alpha| the declared bound on the sampled range
double default_R0(const MaterialModel& model, double nu);

EnergyRecord energy(const StateTriple& state, Epsilon eps, double R, const MaterialModel& model,
                    double nu, const Mesh1D& mesh, MassKind mass);

// one eta substep: time term and -dxx implicit, g and alpha' f_eps(dx theta_ref)
// solved by Newton on the nodal nonlinearities with theta frozen
BulkBoundaryFn step_eta(const StateTriple& prev, const GridFn0& theta_ref, const Vec& u,
                        const BoundaryPair& u_Gamma, double t_new, double tau,
                        const ProblemConfig& cfg, int step_index);

// one theta substep: minimizes the strictly convex per-step functional over V0.
// For eps > 0 damped Newton; for eps = 0 iteratively reweighted smoothing down
// to the floor plus an a-posteriori variational-inequality certificate.
GridFn0 step_theta(const StateTriple& prev, const BulkBoundaryFn& eta_ref, const Vec& v,
                   double t_new, double tau, Epsilon eps, const ProblemConfig& cfg, int step_index,
                   double* vi_residual_out = nullptr);

StateTrajectory solve_state(const StateTriple& init, const ControlTriple& controls,
                            const ProblemConfig& cfg);

}  // namespace kwc

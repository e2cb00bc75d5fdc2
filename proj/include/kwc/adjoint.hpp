#pragma once

// Cost functional, state-dependent coefficient quintets, the adjoint system by
// time reversal of the forward scheme, sensitivity solves, and the adjoint
// representation of the cost gradient (L(u+p), L_Gamma(u_Gamma+p_Gamma), M(v+z)).

#include "kwc/linear.hpp"
#include "kwc/problem.hpp"
#include "kwc/state.hpp"

namespace kwc {

// same shape as a control triplet; node 0 is identically zero
using GradientTriple = ControlTriple;

// sensitivity-system quintet on the trajectory:
//   a = alpha0, b = 0, mu = g'(eta) + alpha''(eta) f_eps(dx theta),
//   omega = alpha'(eta) f_eps'(dx theta), A = alpha(eta) f_eps''(dx theta)
CoefficientQuintet coeffs_from_state(const StateTrajectory& traj, Epsilon eps,
                                     const ProblemConfig& cfg);

template <typename T>
std::vector<T> time_reverse(std::vector<T> seq) {
  std::reverse(seq.begin(), seq.end());
  return seq;
}

// backward adjoint solve realized as R_T o Q* o R_T: reversed coefficients
// a = R_T alpha0, b = R_T(-dt alpha0), reversed tracking residual forcing,
// zero data at the reversed origin. The terminal condition is zero exactly.
LinearTrajectory solve_adjoint(const StateTrajectory& state, const ControlTriple& controls,
                               const ProblemConfig& cfg);

// forward linearized solve with forcing (L h, L_Gamma h_Gamma, M k)
LinearTrajectory solve_sensitivity(const StateTrajectory& state, const ProblemConfig& cfg,
                                   const ControlTriple& direction);

// right-endpoint rectangle quadrature of the six tracking/control terms
double cost(const StateTrajectory& state, const ControlTriple& controls, const ProblemConfig& cfg);

GradientTriple gradient(const StateTrajectory& state, const LinearTrajectory& adjoint,
                        const ControlTriple& controls, const ProblemConfig& cfg);

// inner product and norm of control-shaped triples in the X x H time-integrated sense
double control_inner(const ControlTriple& a, const ControlTriple& b, const ProblemConfig& cfg);
double control_norm(const ControlTriple& a, const ProblemConfig& cfg);

// relative conjugacy residual |(P* u, h) - (u, P h)| / (scale); both operators
// discretize the same continuous pair, so the defect is O(tau + h^2)
double conjugacy_check(const StateTrajectory& state, const ProblemConfig& cfg,
                       const ControlTriple& u_triple, const ControlTriple& h_triple);

}  // namespace kwc

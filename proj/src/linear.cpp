#include "kwc/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kwc {

namespace {

// interleaved unknown ordering keeping the band narrow:
// [p_0, p_1, z_1, p_2, z_2, ..., p_{n-1}, z_{n-1}, p_n]
inline int idx_p(int j, int n) { return (j == 0) ? 0 : (j == n ? 2 * n - 1 : 2 * j - 1); }
inline int idx_z(int j) { return 2 * j; }  // j = 1 .. n-1

}  // namespace

void CoefficientQuintet::check(const Mesh1D& mesh, int n_time_nodes) const {
  auto chk = [&](const std::vector<Vec>& f, std::size_t len, const char* what) {
    if (static_cast<int>(f.size()) != n_time_nodes)
      throw DimensionError(std::string(what) + ": wrong number of time nodes");
    for (const Vec& v : f) require_size(v, len, what);
  };
  chk(a, mesh.n_nodes(), "quintet a");
  chk(b, mesh.n_nodes(), "quintet b");
  chk(mu, mesh.n_nodes(), "quintet mu");
  chk(omega, mesh.n_cells, "quintet omega");
  chk(A, mesh.n_cells, "quintet A");
  for (const Vec& ai : a)
    for (double v : ai)
      if (!(v > 0.0)) throw ConfigError("quintet: a must be positive (class S)");
  for (const Vec& Ai : A)
    for (double v : Ai)
      if (!(v >= 0.0)) throw ConfigError("quintet: A must be nonnegative (class S)");
}

void CoefficientQuintet::measure(const Mesh1D& mesh, MassKind mass) {
  delta_star_a = std::numeric_limits<double>::infinity();
  b_inf = 0.0;
  mu_LinfH = 0.0;
  omega_inf = 0.0;
  A_inf = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (double v : a[i]) delta_star_a = std::min(delta_star_a, v);
    for (double v : b[i]) b_inf = std::max(b_inf, std::abs(v));
    mu_LinfH = std::max(mu_LinfH, norm_H(mesh, mass, mu[i]));
    for (double v : omega[i]) omega_inf = std::max(omega_inf, std::abs(v));
    for (double v : A[i]) A_inf = std::max(A_inf, std::abs(v));
  }
}

double tau0(const CoefficientQuintet& q, double nu) {
  const double num = std::min({1.0, nu * nu, q.delta_star_a});
  const double den = 16.0 * (1.0 + q.b_inf + q.mu_LinfH * q.mu_LinfH + q.omega_inf * q.omega_inf);
  return num / den;
}

EstimateConstants constants(const CoefficientQuintet& q, double nu, double T) {
  EstimateConstants c;
  c.tau0 = tau0(q, nu);
  c.C0 = 16.0 * (1.0 + q.a_W1inf + q.b_inf + q.mu_LinfH * q.mu_LinfH + q.omega_inf * q.omega_inf) /
         std::min({1.0, nu * nu, q.delta_star_a});
  c.C1 = 4.0 * c.C0 * c.C0 * std::exp(1.5 * c.C0 * T);
  c.C2 = 4.0 * std::pow(c.C0, 6) * std::exp(1.5 * c.C0 * T) * (1.0 + q.a_W1inf) * (1.0 + q.a_W1inf) *
         std::pow(1.0 + nu + q.b_inf + q.omega_inf + q.A_inf, 2);
  return c;
}

Vec k_load(const Mesh1D& mesh, MassKind mass, const GridFn0& k_density, const Vec* flux_cells) {
  Vec load = apply_mass_interior(mesh, mass, k_density.full());
  if (flux_cells) {
    require_size(*flux_cells, static_cast<std::size_t>(mesh.n_cells), "k_load flux");
    // -(F, dx psi_j)_H with cellwise F: the hat gradient is +-1/h on its two cells
    for (int j = 0; j < mesh.n_interior(); ++j)
      load[j] += (*flux_cells)[j + 1] - (*flux_cells)[j];
  }
  return load;
}

LinearTriple solve_step(const LinearTriple& prev, const Vec& a_i, const Vec& b_i, const Vec& mu_i,
                        const Vec& omega_i, const Vec& A_i, const Vec& h_i,
                        const BoundaryPair& hG_i, const GridFn0& k_i, double tau, double nu,
                        const Mesh1D& mesh, MassKind mass, double tau0_value, int step_index,
                        std::vector<std::string>* warnings, const Vec* k_flux_i) {
  const int n = mesh.n_cells;
  const int m = mesh.n_interior();
  const int ndof = (n + 1) + m;

  if (tau >= 2.0 * tau0_value)
    throw ConfigError("solve_step: tau = " + std::to_string(tau) + " >= 2 tau0 = " +
                      std::to_string(2.0 * tau0_value) + ", step solvability not guaranteed");
  if (tau >= tau0_value && warnings && step_index <= 1)
    warnings->push_back("tau >= tau0: per-step convexity guarantee lost, proceeding");

  BandMatrix Amat(ndof, 3, 3);

  // p-block: Mx/tau + K + mu-weighted mass
  {
    Tridiag P = weighted_mass(mesh, mass, Vec(n + 1, 1.0));
    for (int j = 0; j <= n; ++j) {
      P.diag[j] /= tau;
      P.lower[j] /= tau;
      P.upper[j] /= tau;
    }
    P.diag.front() += 1.0 / tau;  // boundary H_Gamma part of the X inner product
    P.diag.back() += 1.0 / tau;
    P.add(stiffness(mesh));
    P.add(weighted_mass(mesh, mass, mu_i));
    for (int j = 0; j <= n; ++j) {
      Amat.add(idx_p(j, n), idx_p(j, n), P.diag[j]);
      if (j > 0) Amat.add(idx_p(j, n), idx_p(j - 1, n), P.lower[j]);
      if (j < n) Amat.add(idx_p(j, n), idx_p(j + 1, n), P.upper[j]);
    }
  }

  // z-block: a-weighted mass / tau + b-weighted mass + (A + nu^2) stiffness
  {
    Tridiag Z = weighted_mass_interior(mesh, mass, a_i);
    for (int j = 0; j < m; ++j) {
      Z.diag[j] /= tau;
      Z.lower[j] /= tau;
      Z.upper[j] /= tau;
    }
    Z.add(weighted_mass_interior(mesh, mass, b_i));
    Vec cw(n);
    for (int c = 0; c < n; ++c) cw[c] = A_i[c] + nu * nu;
    Z.add(weighted_stiffness_interior(mesh, cw));
    for (int j = 0; j < m; ++j) {
      Amat.add(idx_z(j + 1), idx_z(j + 1), Z.diag[j]);
      if (j > 0) Amat.add(idx_z(j + 1), idx_z(j), Z.lower[j]);
      if (j + 1 < m) Amat.add(idx_z(j + 1), idx_z(j + 2), Z.upper[j]);
    }
  }

  // coupling: (omega dx z, phi)_H in the p rows and its exact transpose
  // (p omega, dx psi)_H in the z rows, both with the cell-midpoint rule
  for (int c = 0; c < n; ++c) {
    const double oc = 0.5 * omega_i[c];  // h * omega_c * (1/2 at midpoint) * (1/h from dz)
    for (int side = 0; side < 2; ++side) {
      const int j = c + side;
      const int row = idx_p(j, n);
      // dz on cell c reads (z_{c+1} - z_c)/h with implicit zero endpoints
      if (c >= 1) Amat.add(row, idx_z(c), -oc);
      if (c + 1 <= n - 1) Amat.add(row, idx_z(c + 1), oc);
    }
    // z test function psi gradient on cell c couples p_c and p_{c+1}
    for (int side = 0; side < 2; ++side) {
      const int jp = c + side;
      if (c >= 1) Amat.add(idx_z(c), idx_p(jp, n), -oc);
      if (c + 1 <= n - 1) Amat.add(idx_z(c + 1), idx_p(jp, n), oc);
    }
  }

  // right-hand side
  std::vector<double> rhs(ndof, 0.0);
  {
    Vec mp = apply_mass(mesh, mass, prev.p.bulk);
    mp.front() += prev.p.boundary.at0;
    mp.back() += prev.p.boundary.at1;
    const Vec mh = apply_mass(mesh, mass, h_i);
    for (int j = 0; j <= n; ++j) rhs[idx_p(j, n)] = mp[j] / tau + mh[j];
    rhs[idx_p(0, n)] += hG_i.at0;
    rhs[idx_p(n, n)] += hG_i.at1;

    const Tridiag Ma = weighted_mass_interior(mesh, mass, a_i);
    const Vec maz = Ma.apply(prev.z.interior);
    const Vec mk = k_load(mesh, mass, k_i, k_flux_i);
    for (int j = 0; j < m; ++j) rhs[idx_z(j + 1)] = maz[j] / tau + mk[j];
  }

  std::vector<double> sol;
  try {
    sol = Amat.solve(std::move(rhs));
  } catch (const std::runtime_error& e) {
    throw StepFailure(step_index, std::string("coupled step solve failed: ") + e.what());
  }

  Vec pb(n + 1);
  for (int j = 0; j <= n; ++j) pb[j] = sol[idx_p(j, n)];
  Vec zi(m);
  for (int j = 0; j < m; ++j) zi[j] = sol[idx_z(j + 1)];
  return LinearTriple{BulkBoundaryFn::from_bulk(mesh, pb), GridFn0(mesh, zi)};
}

namespace {

double sqrt_weighted_H_sq(const Mesh1D& mesh, MassKind mass, const Vec& weight_nodal,
                          const GridFn0& z) {
  const Tridiag W = weighted_mass_interior(mesh, mass, weight_nodal);
  const Vec wz = W.apply(z.interior);
  double s = 0.0;
  for (std::size_t j = 0; j < wz.size(); ++j) s += wz[j] * z.interior[j];
  return std::max(0.0, s);
}

}  // namespace

LinearTrajectory solve_P(const LinearTriple& init, const CoefficientQuintet& q,
                         const ForcingTriple& forcing, const Mesh1D& mesh, const TimeGrid& tg,
                         double nu, MassKind mass) {
  const int N = tg.steps;
  q.check(mesh, N + 1);
  if (static_cast<int>(forcing.h.size()) != N + 1)
    throw DimensionError("solve_P: forcing not defined on the full time grid");

  LinearTrajectory traj;
  traj.steps = N;
  traj.states.reserve(N + 1);
  traj.states.push_back(init);
  traj.norms.resize(N + 1);
  const double t0v = tau0(q, nu);

  {
    StepNorms& s0 = traj.norms[0];
    s0.p_X_sq = std::pow(norm_X(mesh, mass, init.p), 2);
    s0.az_H_sq = sqrt_weighted_H_sq(mesh, mass, q.a[0], init.z);
    s0.p_W_sq = std::pow(norm_W(mesh, mass, init.p), 2);
    s0.z_V0_sq = std::pow(norm_V0(mesh, init.z), 2);
    s0.grad_p_sq = std::pow(seminorm_grad(mesh, init.p.bulk), 2);
  }

  const bool has_flux = !forcing.k_flux.empty();
  if (has_flux && static_cast<int>(forcing.k_flux.size()) != N + 1)
    throw DimensionError("solve_P: k_flux not defined on the full time grid");

  for (int i = 1; i <= N; ++i) {
    // mu sampled as time-cell averages, the rest at the right endpoint
    Vec mu_i(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j) mu_i[j] = 0.5 * (q.mu[i - 1][j] + q.mu[i][j]);
    LinearTriple cur = solve_step(traj.states.back(), q.a[i], q.b[i], mu_i, q.omega[i], q.A[i],
                                  forcing.h[i], forcing.h_Gamma[i], forcing.k[i], tg.tau, nu, mesh,
                                  mass, t0v, i, &traj.warnings,
                                  has_flux ? &forcing.k_flux[i] : nullptr);

    StepNorms& s = traj.norms[i];
    s.p_X_sq = std::pow(norm_X(mesh, mass, cur.p), 2);
    s.az_H_sq = sqrt_weighted_H_sq(mesh, mass, q.a[i], cur.z);
    s.p_W_sq = std::pow(norm_W(mesh, mass, cur.p), 2);
    s.z_V0_sq = std::pow(norm_V0(mesh, cur.z), 2);
    s.grad_p_sq = std::pow(seminorm_grad(mesh, cur.p.bulk), 2);
    {
      Vec dp(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) dp[j] = cur.p.bulk[j] - traj.states.back().p.bulk[j];
      s.dp_X_sq = inner_H(mesh, mass, dp, dp) + dp.front() * dp.front() + dp.back() * dp.back();
      Vec dz(mesh.n_interior());
      for (int j = 0; j < mesh.n_interior(); ++j)
        dz[j] = cur.z.interior[j] - traj.states.back().z.interior[j];
      s.dz_dual_sq = std::pow(dual_norm_V0_of_density(mesh, mass, GridFn0(mesh, dz)), 2);
    }
    s.h_X_sq = std::pow(norm_H(mesh, mass, forcing.h[i]), 2) +
               forcing.h_Gamma[i].at0 * forcing.h_Gamma[i].at0 +
               forcing.h_Gamma[i].at1 * forcing.h_Gamma[i].at1;
    s.k_dual_sq = std::pow(
        dual_norm_V0(mesh, k_load(mesh, mass, forcing.k[i], has_flux ? &forcing.k_flux[i] : nullptr)),
        2);

    traj.states.push_back(std::move(cur));
  }
  return traj;
}

AprioriReport check_apriori(const LinearTrajectory& traj, const LinearTriple& init,
                            const CoefficientQuintet& q, const EstimateConstants& consts,
                            const Mesh1D& mesh, const TimeGrid& tg, double nu, MassKind mass) {
  (void)init;
  (void)mesh;
  (void)mass;
  AprioriReport rep;
  const double tau = tg.tau;
  const double C0 = consts.C0;
  const int N = traj.steps;

  auto pV_sq_at = [&](int i) {
    return traj.norms[i].p_W_sq - (std::pow(traj.states[i].p.boundary.at0, 2) +
                                   std::pow(traj.states[i].p.boundary.at1, 2));
  };

  rep.step_energy_margin = std::numeric_limits<double>::infinity();
  rep.step_increment_margin = std::numeric_limits<double>::infinity();
  double sum_h_sq = 0.0, sum_k_sq = 0.0, sum_diss = 0.0, sum_dp = 0.0, sum_dz = 0.0;
  double max_pX = traj.norms[0].p_X_sq, max_az = traj.norms[0].az_H_sq;
  double max_pV_sq = pV_sq_at(0);

  for (int i = 1; i <= N; ++i) {
    const StepNorms& s = traj.norms[i];
    const StepNorms& sp = traj.norms[i - 1];
    {
      const double lhs = (s.p_X_sq - sp.p_X_sq) / tau + (s.az_H_sq - sp.az_H_sq) / tau + s.p_W_sq +
                         nu * nu * s.z_V0_sq;
      const double rhs = 0.5 * C0 * (s.p_X_sq + sp.p_X_sq + s.az_H_sq + sp.az_H_sq) +
                         C0 * (s.h_X_sq + s.k_dual_sq);
      const double margin = rhs - lhs;
      rep.step_energy_margin = std::min(rep.step_energy_margin, margin);
      if (margin < -1e-9 * (1.0 + std::abs(rhs))) rep.step_energy_ok = false;
    }
    {
      const double pV_sq = pV_sq_at(i);
      const double lhs = s.dp_X_sq / tau + (s.grad_p_sq - sp.grad_p_sq);
      const double rhs = C0 * tau * (pV_sq + nu * nu * s.z_V0_sq) + 2.0 * tau * s.h_X_sq;
      const double margin = rhs - lhs;
      rep.step_increment_margin = std::min(rep.step_increment_margin, margin);
      if (margin < -1e-9 * (1.0 + std::abs(rhs))) rep.step_increment_ok = false;
      max_pV_sq = std::max(max_pV_sq, pV_sq);
    }
    sum_h_sq += tau * s.h_X_sq;
    sum_k_sq += tau * s.k_dual_sq;
    sum_diss += tau * (s.p_W_sq + nu * nu * s.z_V0_sq);
    max_pX = std::max(max_pX, s.p_X_sq);
    max_az = std::max(max_az, s.az_H_sq);
    sum_dp += tau * s.dp_X_sq / (tau * tau);
    sum_dz += tau * s.dz_dual_sq / (tau * tau);
  }

  const double data = traj.norms[0].p_X_sq + traj.norms[0].az_H_sq + sum_h_sq + sum_k_sq;
  {
    const double lhs = max_pX + max_az + sum_diss;
    const double rhs = 2.0 * C0 * std::exp(C0 * tg.t_end()) * data;
    rep.integrated_margin = rhs - lhs;
    rep.integrated_ok = rep.integrated_margin >= -1e-9 * (1.0 + std::abs(rhs));
  }
  {
    const double dataW = traj.norms[0].p_W_sq + traj.norms[0].az_H_sq + sum_h_sq + sum_k_sq;
    const double lhs_p = sum_dp + max_pV_sq;
    rep.dt_p_margin = consts.C1 * dataW - lhs_p;
    rep.dt_z_margin = consts.C2 * dataW - sum_dz;
    rep.dt_bounds_ok = rep.dt_p_margin >= 0.0 && rep.dt_z_margin >= 0.0;
  }
  (void)q;
  return rep;
}

}  // namespace kwc

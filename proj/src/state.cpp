#include "kwc/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kwc {

namespace {

// adjacent-cell quadrature weights s_j = sum_{cells c at j} (h/2) f_eps(d theta_c),
// so that sum_j alpha(e_j) s_j equals the cellwise midpoint rule with averaged alpha
Vec nodal_feps_weights(const Mesh1D& mesh, Epsilon eps, const Vec& dtheta) {
  Vec s(mesh.n_nodes(), 0.0);
  for (int c = 0; c < mesh.n_cells; ++c) {
    const double v = 0.5 * mesh.h * f_eps(eps, dtheta[c]);
    s[c] += v;
    s[c + 1] += v;
  }
  return s;
}

double residual_norm(const Vec& weights, const Vec& r) {
  double s = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * r[j] / weights[j];
  return std::sqrt(s);
}

// per-step functional of the theta substep at a given smoothing level
double theta_functional(const Mesh1D& mesh, const ProblemConfig& cfg, const Tridiag& mass_a0,
                        const Vec& alpha_cell, Epsilon eps, double tau, const Vec& load,
                        const Vec& theta_prev, const Vec& th) {
  Vec d(theta_prev.size());
  for (std::size_t j = 0; j < th.size(); ++j) d[j] = th[j] - theta_prev[j];
  const Vec md = mass_a0.apply(d);
  double val = 0.5 / tau * std::inner_product(d.begin(), d.end(), md.begin(), 0.0);
  // gradient terms over cells (implicit zero endpoints)
  const int n = mesh.n_cells;
  for (int c = 0; c < n; ++c) {
    const double left = (c == 0) ? 0.0 : th[c - 1];
    const double right = (c == n - 1) ? 0.0 : th[c];
    const double g = (right - left) / mesh.h;
    val += 0.5 * cfg.nu * cfg.nu * mesh.h * g * g + mesh.h * alpha_cell[c] * f_eps(eps, g);
  }
  val -= std::inner_product(th.begin(), th.end(), load.begin(), 0.0);
  return val;
}

struct ThetaSystem {
  Vec grad;      // gradient of the per-step functional at th
  Tridiag hess;  // tridiagonal Hessian
};

ThetaSystem theta_system(const Mesh1D& mesh, const ProblemConfig& cfg, const Tridiag& mass_a0,
                         const Vec& alpha_cell, Epsilon eps, double tau, const Vec& load,
                         const Vec& theta_prev, const Vec& th) {
  const int m = mesh.n_interior();
  ThetaSystem sys{Vec(m, 0.0), Tridiag(m)};
  Vec d(m);
  for (int j = 0; j < m; ++j) d[j] = th[j] - theta_prev[j];
  sys.grad = mass_a0.apply(d);
  for (double& g : sys.grad) g /= tau;
  sys.hess = mass_a0;
  for (int i = 0; i < m; ++i) {
    sys.hess.diag[i] /= tau;
    sys.hess.lower[i] /= tau;
    sys.hess.upper[i] /= tau;
  }
  const double nu2 = cfg.nu * cfg.nu;
  const int n = mesh.n_cells;
  for (int c = 0; c < n; ++c) {
    const double left = (c == 0) ? 0.0 : th[c - 1];
    const double right = (c == n - 1) ? 0.0 : th[c];
    const double g = (right - left) / mesh.h;
    const double flux = nu2 * g + alpha_cell[c] * f_eps_prime(eps, g);
    const double dflux = (nu2 + alpha_cell[c] * f_eps_double_prime(eps, g)) / mesh.h;
    // cell c couples interior nodes c-1 (left) and c (right)
    if (c > 0) {
      sys.grad[c - 1] -= flux;
      sys.hess.diag[c - 1] += dflux;
    }
    if (c < n - 1) {
      sys.grad[c] += flux;
      sys.hess.diag[c] += dflux;
    }
    if (c > 0 && c < n - 1) {
      sys.hess.upper[c - 1] -= dflux;
      sys.hess.lower[c] -= dflux;
    }
  }
  for (int j = 0; j < m; ++j) sys.grad[j] -= load[j];
  return sys;
}

// damped Newton on the gradient system of the smooth per-step functional.
// The Hessian is SPD, so the Newton direction always decreases the residual
// norm; iteration stops at the tolerance or when the line search makes no
// further progress (the caller decides whether a stall is acceptable).
Vec theta_newton(const Mesh1D& mesh, const ProblemConfig& cfg, const Tridiag& mass_a0,
                 const Vec& alpha_cell, Epsilon eps, double tau, const Vec& load,
                 const Vec& theta_prev, Vec th, double* residual_out) {
  const Vec w_full = lumped_weights(mesh);
  const Vec w_int(w_full.begin() + 1, w_full.end() - 1);
  double rnorm =
      residual_norm(w_int, theta_system(mesh, cfg, mass_a0, alpha_cell, eps, tau, load, theta_prev, th).grad);
  for (int it = 0; it < cfg.solver.newton_max_iter && rnorm > cfg.solver.newton_tol; ++it) {
    ThetaSystem sys = theta_system(mesh, cfg, mass_a0, alpha_cell, eps, tau, load, theta_prev, th);
    Vec rhs = sys.grad;
    for (double& r : rhs) r = -r;
    const Vec dir = sys.hess.solve(rhs);
    double t = 1.0;
    Vec trial(th.size());
    bool accepted = false;
    for (int ls = 0; ls < 50 && !accepted; ++ls) {
      for (std::size_t j = 0; j < th.size(); ++j) trial[j] = th[j] + t * dir[j];
      const double rtrial = residual_norm(
          w_int,
          theta_system(mesh, cfg, mass_a0, alpha_cell, eps, tau, load, theta_prev, trial).grad);
      if (rtrial < rnorm) {
        th = trial;
        rnorm = rtrial;
        accepted = true;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // at the attainable floor for this smoothing level
  }
  if (residual_out) *residual_out = rnorm;
  return th;
}

}  // namespace

double default_R0(const MaterialModel& model, double nu) {
  return 1.0 + 2.0 * model.alpha_range_sup * model.alpha_range_sup / (nu * nu);
}

EnergyRecord energy(const StateTriple& state, Epsilon eps, double R, const MaterialModel& model,
                    double nu, const Mesh1D& mesh, MassKind mass) {
  EnergyRecord rec;
  const Vec& eta = state.eta.bulk;
  const Vec deta = diff_x(mesh, eta);
  const Vec dtheta = diff_x(mesh, state.theta);
  const Vec acell = cell_average([&] {
    Vec a(eta.size());
    for (std::size_t j = 0; j < eta.size(); ++j) a[j] = model.alpha(eta[j]);
    return a;
  }());

  double grad_term = 0.0, coupled = 0.0, alpha_sq = 0.0;
  for (int c = 0; c < mesh.n_cells; ++c) {
    grad_term += 0.5 * mesh.h * deta[c] * deta[c];
    const double fe = f_eps(eps, dtheta[c]);
    const double q = nu * fe + acell[c] / nu;
    coupled += 0.5 * mesh.h * q * q;
    alpha_sq += 0.5 * mesh.h * acell[c] * acell[c] / (nu * nu);
  }
  const double eta_sq = inner_H(mesh, mass, eta, eta);
  rec.phi = grad_term + 0.5 * R * eta_sq + coupled;

  const Vec w = lumped_weights(mesh);
  double Gterm = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) Gterm += w[j] * model.G(eta[j]);
  rec.ghat = Gterm - 0.5 * R * eta_sq - alpha_sq;
  return rec;
}

BulkBoundaryFn step_eta(const StateTriple& prev, const GridFn0& theta_ref, const Vec& u,
                        const BoundaryPair& u_Gamma, double t_new, double tau,
                        const ProblemConfig& cfg, int step_index) {
  (void)t_new;
  const Mesh1D& mesh = cfg.mesh;
  const int n = mesh.n_nodes();
  const MaterialModel& mat = cfg.material;
  const Vec w = lumped_weights(mesh);
  const Vec s = nodal_feps_weights(mesh, cfg.eps, diff_x(mesh, theta_ref));
  const Tridiag K = stiffness(mesh);
  const Tridiag Mh = weighted_mass(mesh, cfg.mass, Vec(n, 1.0));

  // load: (L u, phi)_H + boundary rows (L_Gamma u_Gamma, phi_Gamma)
  Vec load(n, 0.0);
  {
    Vec lu(n);
    for (int j = 0; j < n; ++j) lu[j] = cfg.weights.L * u[j];
    load = apply_mass(mesh, cfg.mass, lu);
    load.front() += cfg.weights.L_Gamma * u_Gamma.at0;
    load.back() += cfg.weights.L_Gamma * u_Gamma.at1;
  }

  auto mx_apply = [&](const Vec& x) {
    Vec y = Mh.apply(x);
    y.front() += x.front();
    y.back() += x.back();
    return y;
  };

  auto residual = [&](const Vec& e) {
    Vec r = mx_apply([&] {
      Vec d(e.size());
      for (int j = 0; j < n; ++j) d[j] = e[j] - prev.eta.bulk[j];
      return d;
    }());
    for (double& x : r) x /= tau;
    const Vec ke = K.apply(e);
    for (int j = 0; j < n; ++j)
      r[j] += ke[j] + w[j] * mat.g(e[j]) + s[j] * mat.alpha_prime(e[j]) - load[j];
    return r;
  };

  Vec wx = w;
  wx.front() += 1.0;
  wx.back() += 1.0;

  Vec e = prev.eta.bulk;
  double rnorm = residual_norm(wx, residual(e));
  for (int it = 0; it < cfg.solver.newton_max_iter && rnorm > cfg.solver.newton_tol; ++it) {
    Tridiag J = Mh;
    for (int j = 0; j < n; ++j) {
      J.diag[j] /= tau;
      J.lower[j] /= tau;
      J.upper[j] /= tau;
    }
    J.diag.front() += 1.0 / tau;
    J.diag.back() += 1.0 / tau;
    J.add(K);
    for (int j = 0; j < n; ++j)
      J.diag[j] += w[j] * mat.g_prime(e[j]) + s[j] * mat.alpha_double_prime(e[j]);

    Vec rhs = residual(e);
    for (double& r : rhs) r = -r;
    const Vec dir = J.solve(rhs);
    double t = 1.0;
    Vec trial(n);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (int j = 0; j < n; ++j) trial[j] = e[j] + t * dir[j];
      const double rtrial = residual_norm(wx, residual(trial));
      if (rtrial < rnorm) {
        e = trial;
        rnorm = rtrial;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  if (rnorm > 1e3 * cfg.solver.newton_tol)
    throw StepFailure(step_index,
                      "eta substep: Newton did not converge, residual " + std::to_string(rnorm));
  return BulkBoundaryFn::from_bulk(mesh, e);
}

GridFn0 step_theta(const StateTriple& prev, const BulkBoundaryFn& eta_ref, const Vec& v,
                   double t_new, double tau, Epsilon eps, const ProblemConfig& cfg, int step_index,
                   double* vi_residual_out) {
  const Mesh1D& mesh = cfg.mesh;
  const MaterialModel& mat = cfg.material;
  const int m = mesh.n_interior();

  Vec alpha0_nodal(mesh.n_nodes());
  for (int j = 0; j < mesh.n_nodes(); ++j) alpha0_nodal[j] = mat.alpha0(t_new, mesh.node(j));
  const Tridiag mass_a0 = weighted_mass_interior(mesh, cfg.mass, alpha0_nodal);

  Vec alpha_cell = cell_average([&] {
    Vec a(eta_ref.bulk.size());
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = mat.alpha(eta_ref.bulk[j]);
    return a;
  }());

  Vec mv(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) mv[j] = cfg.weights.M * v[j];
  const Vec load = apply_mass_interior(mesh, cfg.mass, mv);

  const Vec theta_prev = prev.theta.interior;
  Vec th = theta_prev;

  if (!eps.is_zero()) {
    double rn = 0.0;
    th = theta_newton(mesh, cfg, mass_a0, alpha_cell, eps, tau, load, theta_prev, th, &rn);
    if (rn > 1e3 * cfg.solver.newton_tol)
      throw StepFailure(step_index,
                        "theta substep: Newton stalled, residual " + std::to_string(rn));
    if (vi_residual_out) *vi_residual_out = 0.0;
    return GridFn0(mesh, th);
  }

  // eps = 0: iteratively reweighted smoothing eps_k down to the floor. Each
  // level is solved to its attainable accuracy; the candidate kept is the one
  // with the smallest singular-limit objective, theta_prev included, so the
  // per-step energy decrease is unconditional.
  const Epsilon zero(0.0);
  Vec best = theta_prev;
  double best_val =
      theta_functional(mesh, cfg, mass_a0, alpha_cell, zero, tau, load, theta_prev, best);
  double ek = 1e-2;
  while (true) {
    th = theta_newton(mesh, cfg, mass_a0, alpha_cell, Epsilon(ek), tau, load, theta_prev, th,
                      nullptr);
    const double val =
        theta_functional(mesh, cfg, mass_a0, alpha_cell, zero, tau, load, theta_prev, th);
    if (val < best_val) {
      best_val = val;
      best = th;
    }
    if (ek <= cfg.solver.eps_smoothing_floor) break;
    ek = std::max(ek / 8.0, cfg.solver.eps_smoothing_floor);
  }
  th = best;

  // a-posteriori variational inequality certificate against perturbations
  if (vi_residual_out) {
    const Epsilon zero(0.0);
    double worst = 0.0;
    const double f_th =
        theta_functional(mesh, cfg, mass_a0, alpha_cell, zero, tau, load, theta_prev, th);
    std::uint64_t s = 0x9e3779b97f4a7c15ull + 1000ull * step_index;
    auto next_unit = [&s]() {
      s ^= s << 13;
      s ^= s >> 7;
      s ^= s << 17;
      return 2.0 * (static_cast<double>(s % 1000003ull) / 1000003.0) - 1.0;
    };
    for (int k = 0; k < cfg.solver.vi_check_directions; ++k) {
      Vec psi(m);
      for (int j = 0; j < m; ++j) psi[j] = th[j] + 0.3 * next_unit();
      const double f_psi =
          theta_functional(mesh, cfg, mass_a0, alpha_cell, zero, tau, load, theta_prev, psi);
      worst = std::max(worst, f_th - f_psi);  // minimality: f(th) <= f(psi)
    }
    *vi_residual_out = worst;
  }
  return GridFn0(mesh, th);
}

StateTrajectory solve_state(const StateTriple& init, const ControlTriple& controls,
                            const ProblemConfig& cfg) {
  cfg.check();
  const Mesh1D& mesh = cfg.mesh;
  const TimeGrid& tg = cfg.time;
  const int N = tg.steps;
  require_size(init.eta.bulk, static_cast<std::size_t>(mesh.n_nodes()), "solve_state init eta");
  if (static_cast<int>(controls.u.size()) != tg.n_nodes())
    throw DimensionError("solve_state: controls not defined on the full time grid");

  StateTrajectory traj;
  traj.steps = N;
  traj.states.reserve(N + 1);
  traj.states.push_back(init);
  traj.theta_vi_residual.assign(N + 1, 0.0);

  const double R0 = default_R0(cfg.material, cfg.nu);
  if (cfg.solver.record_energy) {
    traj.energy.reserve(N + 1);
    traj.energy.push_back(energy(init, cfg.eps, R0, cfg.material, cfg.nu, mesh, cfg.mass));
  }

  // stability guard: the linearized-system step bound tau0 evaluated with
  // coefficients frozen at the initial state (smoothed eps for the bound)
  {
    const MaterialModel& mat = cfg.material;
    const Epsilon eps_eff(std::max(cfg.eps.value, 0.05));
    const Vec dth = diff_x(mesh, init.theta);
    Vec f_cell(mesh.n_cells), mu(mesh.n_nodes());
    for (int c = 0; c < mesh.n_cells; ++c) f_cell[c] = f_eps(eps_eff, dth[c]);
    const Vec f_node = node_average_of_cells(mesh, f_cell);
    double delta = std::numeric_limits<double>::infinity(), omega_inf = 0.0;
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      const double e = init.eta.bulk[j];
      mu[j] = mat.g_prime(e) + mat.alpha_double_prime(e) * f_node[j];
      delta = std::min(delta, mat.alpha0(0.0, mesh.node(j)));
      if (j < mesh.n_cells)
        omega_inf = std::max(omega_inf, std::abs(0.5 * (mat.alpha_prime(init.eta.bulk[j]) +
                                                        mat.alpha_prime(init.eta.bulk[j + 1])) *
                                                 f_eps_prime(eps_eff, dth[j])));
    }
    const double mu_H = norm_H(mesh, cfg.mass, mu);
    const double t0 =
        std::min({1.0, cfg.nu * cfg.nu, delta}) / (16.0 * (1.0 + mu_H * mu_H + omega_inf * omega_inf));
    if (tg.tau > t0)
      traj.warnings.push_back("tau = " + std::to_string(tg.tau) +
                              " exceeds the frozen-coefficient step bound tau0 = " +
                              std::to_string(t0));
  }

  for (int i = 1; i <= N; ++i) {
    const StateTriple& prev = traj.states.back();
    BulkBoundaryFn eta_i = step_eta(prev, prev.theta, controls.u[i], controls.u_Gamma[i], tg.t(i),
                                    tg.tau, cfg, i);
    double vi = 0.0;
    GridFn0 theta_i =
        step_theta(prev, eta_i, controls.v[i], tg.t(i), tg.tau, cfg.eps, cfg, i,
                   cfg.eps.is_zero() ? &vi : nullptr);
    traj.theta_vi_residual[i] = vi;
    if (cfg.eps.is_zero() && vi > cfg.solver.vi_tol)
      traj.warnings.push_back("step " + std::to_string(i) +
                              ": eps=0 variational inequality certificate residual " +
                              std::to_string(vi));

    StateTriple cur{eta_i, theta_i};
    if (cfg.solver.record_energy) {
      EnergyRecord rec = energy(cur, cfg.eps, R0, cfg.material, cfg.nu, mesh, cfg.mass);
      // work rate and weighted squared time-increment of the step
      Vec de(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) de[j] = cur.eta.bulk[j] - prev.eta.bulk[j];
      Vec lu(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) lu[j] = cfg.weights.L * controls.u[i][j];
      double work = inner_H(mesh, cfg.mass, lu, de);
      work += cfg.weights.L_Gamma * controls.u_Gamma[i].at0 * (cur.eta.boundary.at0 - prev.eta.boundary.at0);
      work += cfg.weights.L_Gamma * controls.u_Gamma[i].at1 * (cur.eta.boundary.at1 - prev.eta.boundary.at1);
      Vec dth_full = cur.theta.full();
      const Vec prev_full = prev.theta.full();
      for (std::size_t j = 0; j < dth_full.size(); ++j) dth_full[j] -= prev_full[j];
      Vec mv(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) mv[j] = cfg.weights.M * controls.v[i][j];
      work += inner_H(mesh, cfg.mass, mv, dth_full);
      rec.work = work / tg.tau;

      double diss = inner_H(mesh, cfg.mass, de, de);
      diss += de.front() * de.front() + de.back() * de.back();
      Vec a0(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) a0[j] = cfg.material.alpha0(tg.t(i), mesh.node(j));
      Vec a0_dth(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) a0_dth[j] = a0[j] * dth_full[j];
      diss += inner_H(mesh, cfg.mass, a0_dth, dth_full);
      rec.dissipation = diss / (tg.tau * tg.tau);
      traj.energy.push_back(rec);
    }
    traj.states.push_back(std::move(cur));
  }
  return traj;
}

}  // namespace kwc

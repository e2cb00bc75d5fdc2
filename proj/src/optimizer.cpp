#include "kwc/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace kwc {

namespace {

ControlTriple axpy(const ControlTriple& base, double s, const ControlTriple& dir) {
  ControlTriple out = base;
  const int nn = static_cast<int>(base.u.size());
  for (int i = 1; i < nn; ++i) {
    for (std::size_t j = 0; j < out.u[i].size(); ++j) out.u[i][j] += s * dir.u[i][j];
    out.u_Gamma[i].at0 += s * dir.u_Gamma[i].at0;
    out.u_Gamma[i].at1 += s * dir.u_Gamma[i].at1;
    for (std::size_t j = 0; j < out.v[i].size(); ++j) out.v[i][j] += s * dir.v[i][j];
  }
  return out;
}

ControlTriple diff(const ControlTriple& a, const ControlTriple& b) {
  ControlTriple out = a;
  const int nn = static_cast<int>(a.u.size());
  for (int i = 1; i < nn; ++i) {
    for (std::size_t j = 0; j < out.u[i].size(); ++j) out.u[i][j] -= b.u[i][j];
    out.u_Gamma[i].at0 -= b.u_Gamma[i].at0;
    out.u_Gamma[i].at1 -= b.u_Gamma[i].at1;
    for (std::size_t j = 0; j < out.v[i].size(); ++j) out.v[i][j] -= b.v[i][j];
  }
  return out;
}

}  // namespace

OptResult solve_OP(const ProblemConfig& cfg, const StateTriple& init_state,
                   const ControlTriple& init_controls, const OptimizerConfig& opt) {
  opt.check();
  cfg.check();
  if (cfg.eps.is_zero())
    throw SingularLimitError("solve_OP: eps > 0 required, use solve_OP0 for the singular problem");

  OptResult res;
  res.controls = init_controls;
  res.state = solve_state(init_state, res.controls, cfg);
  double J = cost(res.state, res.controls, cfg);
  LinearTrajectory adj = solve_adjoint(res.state, res.controls, cfg);
  GradientTriple g = gradient(res.state, adj, res.controls, cfg);
  double gn = control_norm(g, cfg);
  res.history.push_back({0, cfg.eps.value, J, gn, 0.0, gn});

  bool have_prev = false;
  ControlTriple prev_u, prev_g;

  for (int iter = 1; iter <= opt.max_iters; ++iter) {
    if (gn < opt.grad_tol) {
      res.converged = true;
      break;
    }

    double s = opt.init_step;
    if (opt.strategy == StepStrategy::barzilai_borwein && have_prev) {
      const ControlTriple du = diff(res.controls, prev_u);
      const ControlTriple dg = diff(g, prev_g);
      const double ss = control_inner(du, du, cfg);
      const double sy = control_inner(du, dg, cfg);
      if (sy > 1e-300) s = std::clamp(ss / sy, 1e-8, 1e6);
    }

    ControlTriple u_try;
    StateTrajectory state_try;
    double J_try = 0.0;
    bool accepted = false;

    if (opt.strategy == StepStrategy::fixed) {
      u_try = axpy(res.controls, -s, g);
      state_try = solve_state(init_state, u_try, cfg);
      J_try = cost(state_try, u_try, cfg);
      accepted = true;
    } else {
      while (s > 1e-16) {
        u_try = axpy(res.controls, -s, g);
        state_try = solve_state(init_state, u_try, cfg);
        J_try = cost(state_try, u_try, cfg);
        if (J_try <= J - opt.c1 * s * gn * gn) {
          accepted = true;
          break;
        }
        s *= opt.backtrack;
      }
      if (!accepted) {
        res.line_search_failed = true;
        break;
      }
    }

    prev_u = res.controls;
    prev_g = g;
    have_prev = true;

    const double decrease = J - J_try;
    res.controls = std::move(u_try);
    res.state = std::move(state_try);
    J = J_try;
    adj = solve_adjoint(res.state, res.controls, cfg);
    g = gradient(res.state, adj, res.controls, cfg);
    gn = control_norm(g, cfg);
    res.history.push_back({iter, cfg.eps.value, J, gn, s, gn});

    // accepted decreases below float resolution cannot compound; stop here
    if (opt.strategy != StepStrategy::fixed && decrease <= 1e-15 * (1.0 + std::abs(J))) break;
  }
  if (gn < opt.grad_tol) res.converged = true;
  return res;
}

namespace {

// nodal limit coefficient mu° = g'(eta) + alpha''(eta) |dx theta| at one node
Vec limit_mu(const Mesh1D& mesh, const MaterialModel& mat, const StateTriple& st) {
  const Vec dth = diff_x(mesh, st.theta);
  Vec absd(mesh.n_cells);
  for (int c = 0; c < mesh.n_cells; ++c) absd[c] = std::abs(dth[c]);
  const Vec absd_node = node_average_of_cells(mesh, absd);
  Vec mu(mesh.n_nodes());
  for (int j = 0; j < mesh.n_nodes(); ++j)
    mu[j] = mat.g_prime(st.eta.bulk[j]) + mat.alpha_double_prime(st.eta.bulk[j]) * absd_node[j];
  return mu;
}

}  // namespace

ContinuationResult solve_OP0(const ProblemConfig& cfg, const StateTriple& init_state,
                             const ContinuationSchedule& schedule) {
  schedule.check();
  const Mesh1D& mesh = cfg.mesh;
  const TimeGrid& tg = cfg.time;
  const int N = tg.steps;

  ContinuationResult out;
  out.controls = ControlTriple::zero(mesh, tg);

  ProblemConfig cfg_smooth = cfg;
  bool have_smooth = false;
  StateTrajectory state_smooth;
  StateTrajectory state_final;
  bool final_is_zero_level = false;

  for (double eps_k : schedule.eps_levels) {
    if (eps_k > 0.0) {
      ProblemConfig cfg_k = cfg;
      cfg_k.eps = Epsilon(eps_k);
      try {
        OptResult res = solve_OP(cfg_k, init_state, out.controls, schedule.opt);
        out.controls = res.controls;
        state_smooth = std::move(res.state);
        cfg_smooth = cfg_k;
        have_smooth = true;
        for (const HistoryRow& row : res.history) out.history.push_back(row);
        out.level_notes.push_back("eps=" + std::to_string(eps_k) + ": " +
                                  (res.converged ? "converged" : "iteration budget reached") +
                                  (res.line_search_failed ? " (line search underflow)" : ""));
      } catch (const std::exception& e) {
        out.level_notes.push_back("eps=" + std::to_string(eps_k) + ": failed (" + e.what() +
                                  "), continuing with previous warm start");
      }
      final_is_zero_level = false;
    } else {
      // singular level: evaluate the state with the warm-started controls
      ProblemConfig cfg0 = cfg;
      cfg0.eps = Epsilon(0.0);
      state_final = solve_state(init_state, out.controls, cfg0);
      final_is_zero_level = true;
      out.level_notes.push_back("eps=0: state evaluated with warm-started controls");
    }
  }
  if (!have_smooth)
    throw ConfigError("solve_OP0: no smooth level succeeded, certificates unavailable");
  if (!final_is_zero_level) state_final = state_smooth;

  // ---- limit certificates from the last smooth level -----------------------
  LimitCertificate& cert = out.certificate;
  cert.eps_last_smooth = cfg_smooth.eps.value;

  LinearTrajectory adj = solve_adjoint(state_smooth, out.controls, cfg_smooth);
  GradientTriple g = gradient(state_smooth, adj, out.controls, cfg_smooth);
  cert.optimality_residual = control_norm(g, cfg_smooth);

  CoefficientQuintet q = coeffs_from_state(state_smooth, cfg_smooth.eps, cfg_smooth);

  cert.nu_field.assign(N + 1, Vec(mesh.n_cells, 0.0));
  cert.xi_field.assign(N + 1, Vec(mesh.n_cells, 0.0));
  cert.sgn_field.assign(N + 1, Vec(mesh.n_cells, 0.0));
  for (int i = 0; i <= N; ++i) {
    const Vec dth = diff_x(mesh, state_smooth.states[i].theta);
    const Vec dth_limit = diff_x(mesh, state_final.states[i].theta);
    const Vec dz = diff_x(mesh, adj.states[i].z);
    for (int c = 0; c < mesh.n_cells; ++c) {
      const double nu_c = f_eps_prime(cfg_smooth.eps, dth[c]);
      cert.nu_field[i][c] = nu_c;
      cert.xi_field[i][c] = q.omega[i][c] * dz[c];
      cert.sgn_field[i][c] = sgn_residual(nu_c, dth_limit[c]);
      cert.sgn_residual_max = std::max(cert.sgn_residual_max, cert.sgn_field[i][c]);
      cert.nu_abs_max = std::max(cert.nu_abs_max, std::abs(nu_c));
    }
  }

  // residual of the limit p-equation, reassembled against all W basis functions
  cert.p_eq_residual.assign(N, 0.0);
  {
    const Tridiag K = stiffness(mesh);
    const Tridiag Mh = weighted_mass(mesh, cfg.mass, Vec(mesh.n_nodes(), 1.0));
    Vec wx = lumped_weights(mesh);
    wx.front() += 1.0;
    wx.back() += 1.0;
    std::vector<Vec> mu0(N + 1);
    for (int i = 0; i <= N; ++i) mu0[i] = limit_mu(mesh, cfg.material, state_final.states[i]);

    for (int i = 0; i < N; ++i) {
      const BulkBoundaryFn& p_i = adj.states[i].p;
      const BulkBoundaryFn& p_n = adj.states[i + 1].p;
      Vec dp(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) dp[j] = p_n.bulk[j] - p_i.bulk[j];
      Vec res = Mh.apply(dp);
      res.front() += dp.front();
      res.back() += dp.back();
      for (double& r : res) r = -r / tg.tau;

      const Vec kp = K.apply(p_i.bulk);
      Vec mubar(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) mubar[j] = 0.5 * (mu0[i][j] + mu0[i + 1][j]);
      Tridiag Wm = weighted_mass(mesh, cfg.mass, mubar);
      const Vec mup = Wm.apply(p_i.bulk);
      for (int j = 0; j < mesh.n_nodes(); ++j) res[j] += kp[j] + mup[j];
      // cellwise xi against the midpoint values of the test functions
      for (int c = 0; c < mesh.n_cells; ++c) {
        const double v = 0.5 * mesh.h * cert.xi_field[i][c];
        res[c] += v;
        res[c + 1] += v;
      }
      // tracking forcing of the limit equation
      Vec rhs(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j)
        rhs[j] = cfg.weights.K * (state_final.states[i].eta.bulk[j] - cfg.targets.eta_ad[i][j]);
      const Vec mrhs = apply_mass(mesh, cfg.mass, rhs);
      for (int j = 0; j < mesh.n_nodes(); ++j) res[j] -= mrhs[j];
      res.front() -= cfg.weights.K_Gamma *
                     (state_final.states[i].eta.boundary.at0 - cfg.targets.eta_Gamma_ad[i].at0);
      res.back() -= cfg.weights.K_Gamma *
                    (state_final.states[i].eta.boundary.at1 - cfg.targets.eta_Gamma_ad[i].at1);

      double s = 0.0;
      for (int j = 0; j < mesh.n_nodes(); ++j) s += res[j] * res[j] / wx[j];
      cert.p_eq_residual[i] = std::sqrt(s);
    }
  }

  // remainder functional (the zeta distribution) on a fixed U0 test family
  {
    const double Tg = tg.t_end();
    const Vec w = lumped_weights(mesh);
    for (int mode = 1; mode <= 3; ++mode) {
      for (int tprof = 0; tprof < 2; ++tprof) {
        auto Tfun = [&](double t) { return tprof == 0 ? t / Tg : (t / Tg) * (t / Tg); };
        auto Tdot = [&](double t) { return tprof == 0 ? 1.0 / Tg : 2.0 * t / (Tg * Tg); };
        Vec S(mesh.n_nodes()), dS(mesh.n_cells);
        for (int j = 0; j < mesh.n_nodes(); ++j)
          S[j] = std::sin(mode * 3.14159265358979323846 * mesh.node(j));
        for (int c = 0; c < mesh.n_cells; ++c) dS[c] = (S[c + 1] - S[c]) / mesh.h;

        double val = 0.0;
        for (int i = 1; i <= N; ++i) {
          const double t = tg.t(i);
          const Vec zf = adj.states[i].z.full();
          const Vec dz = diff_x(mesh, adj.states[i].z);
          const Vec& eta = state_final.states[i].eta.bulk;
          const Vec thf = state_final.states[i].theta.full();
          double term = 0.0;
          // (Lambda (theta - theta_ad), psi) - (alpha0 z, dt psi)
          for (int j = 0; j < mesh.n_nodes(); ++j) {
            const double a0 = cfg.material.alpha0(t, mesh.node(j));
            term += w[j] * (cfg.weights.Lambda * (thf[j] - cfg.targets.theta_ad[i][j]) * Tfun(t) -
                            a0 * zf[j] * Tdot(t)) * S[j];
          }
          // - (nu^2 dx z + alpha'(eta) nu p, dx psi)
          for (int c = 0; c < mesh.n_cells; ++c) {
            const double ap = 0.5 * (cfg.material.alpha_prime(eta[c]) +
                                     cfg.material.alpha_prime(eta[c + 1]));
            const double pmid = 0.5 * (adj.states[i].p.bulk[c] + adj.states[i].p.bulk[c + 1]);
            term -= mesh.h *
                    (cfg.nu * cfg.nu * dz[c] + ap * cert.nu_field[i][c] * pmid) * Tfun(t) * dS[c];
          }
          val += tg.tau * term;
        }
        cert.zeta_values.push_back(val);
      }
    }
  }

  out.state = std::move(state_final);
  return out;
}

}  // namespace kwc

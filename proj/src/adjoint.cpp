#include "kwc/adjoint.hpp"

#include <algorithm>
#include <cmath>

namespace kwc {

namespace {

// forcing triplet [h, h_Gamma, k] as plain per-node sequences
struct RawForcing {
  std::vector<Vec> h;
  std::vector<BoundaryPair> hG;
  std::vector<Vec> k;  // full nodal, interior part used
};

void check_targets(const ProblemConfig& cfg, const char* what) {
  const auto nn = static_cast<std::size_t>(cfg.time.n_nodes());
  if (cfg.targets.eta_ad.size() != nn || cfg.targets.eta_Gamma_ad.size() != nn ||
      cfg.targets.theta_ad.size() != nn)
    throw DimensionError(std::string(what) + ": targets not defined on the full time grid");
  for (const Vec& v : cfg.targets.eta_ad)
    require_size(v, static_cast<std::size_t>(cfg.mesh.n_nodes()), what);
  for (const Vec& v : cfg.targets.theta_ad)
    require_size(v, static_cast<std::size_t>(cfg.mesh.n_nodes()), what);
}

ForcingTriple to_forcing(const Mesh1D& mesh, const RawForcing& raw) {
  ForcingTriple f;
  f.h = raw.h;
  f.h_Gamma = raw.hG;
  f.k.reserve(raw.k.size());
  for (const Vec& kv : raw.k)
    f.k.push_back(GridFn0(mesh, Vec(kv.begin() + 1, kv.end() - 1)));
  return f;
}

}  // namespace

CoefficientQuintet coeffs_from_state(const StateTrajectory& traj, Epsilon eps,
                                     const ProblemConfig& cfg) {
  if (eps.is_zero())
    throw SingularLimitError("coeffs_from_state: sensitivity coefficients need eps > 0");
  const Mesh1D& mesh = cfg.mesh;
  const MaterialModel& mat = cfg.material;
  const int nn = static_cast<int>(traj.states.size());

  CoefficientQuintet q;
  q.a.reserve(nn);
  q.b.assign(nn, Vec(mesh.n_nodes(), 0.0));
  q.mu.reserve(nn);
  q.omega.reserve(nn);
  q.A.reserve(nn);

  for (int i = 0; i < nn; ++i) {
    const double t = cfg.time.t(i);
    Vec a_i(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j) a_i[j] = mat.alpha0(t, mesh.node(j));
    q.a.push_back(std::move(a_i));

    const Vec& eta = traj.states[i].eta.bulk;
    const Vec dth = diff_x(mesh, traj.states[i].theta);
    Vec f_cell(mesh.n_cells), fp_cell(mesh.n_cells), fpp_cell(mesh.n_cells);
    for (int c = 0; c < mesh.n_cells; ++c) {
      f_cell[c] = f_eps(eps, dth[c]);
      fp_cell[c] = f_eps_prime(eps, dth[c]);
      fpp_cell[c] = f_eps_double_prime(eps, dth[c]);
    }
    const Vec f_node = node_average_of_cells(mesh, f_cell);

    Vec mu_i(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j)
      mu_i[j] = mat.g_prime(eta[j]) + mat.alpha_double_prime(eta[j]) * f_node[j];
    q.mu.push_back(std::move(mu_i));

    Vec alpha_cell(mesh.n_cells), alphap_cell(mesh.n_cells);
    for (int c = 0; c < mesh.n_cells; ++c) {
      alpha_cell[c] = 0.5 * (mat.alpha(eta[c]) + mat.alpha(eta[c + 1]));
      alphap_cell[c] = 0.5 * (mat.alpha_prime(eta[c]) + mat.alpha_prime(eta[c + 1]));
    }
    Vec om(mesh.n_cells), Ai(mesh.n_cells);
    for (int c = 0; c < mesh.n_cells; ++c) {
      om[c] = alphap_cell[c] * fp_cell[c];
      Ai[c] = alpha_cell[c] * fpp_cell[c];
    }
    q.omega.push_back(std::move(om));
    q.A.push_back(std::move(Ai));
  }
  q.a_W1inf = mat.alpha0_W1inf;
  q.measure(mesh, cfg.mass);
  return q;
}

LinearTrajectory solve_adjoint(const StateTrajectory& state, const ControlTriple& controls,
                               const ProblemConfig& cfg) {
  (void)controls;
  check_targets(cfg, "solve_adjoint");
  const Mesh1D& mesh = cfg.mesh;
  const TimeGrid& tg = cfg.time;
  const int N = tg.steps;
  const double Tg = tg.t_end();

  CoefficientQuintet q = coeffs_from_state(state, cfg.eps, cfg);
  // reverse: a = R_T alpha0, b = R_T(-dt alpha0); mu, omega, A reversed
  CoefficientQuintet rq;
  rq.mu = time_reverse(q.mu);
  rq.omega = time_reverse(q.omega);
  rq.A = time_reverse(q.A);
  rq.a.reserve(N + 1);
  rq.b.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    const double t = Tg - tg.t(i);
    Vec a_i(mesh.n_nodes()), b_i(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      a_i[j] = cfg.material.alpha0(t, mesh.node(j));
      b_i[j] = -cfg.material.alpha0_dt(t, mesh.node(j));
    }
    rq.a.push_back(std::move(a_i));
    rq.b.push_back(std::move(b_i));
  }
  rq.a_W1inf = cfg.material.alpha0_W1inf;
  rq.measure(mesh, cfg.mass);

  RawForcing raw;
  raw.h.resize(N + 1);
  raw.hG.resize(N + 1);
  raw.k.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    const int r = N - i;  // reversed index
    Vec h_i(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j)
      h_i[j] = cfg.weights.K * (state.states[r].eta.bulk[j] - cfg.targets.eta_ad[r][j]);
    raw.h[i] = std::move(h_i);
    raw.hG[i] = BoundaryPair{
        cfg.weights.K_Gamma * (state.states[r].eta.boundary.at0 - cfg.targets.eta_Gamma_ad[r].at0),
        cfg.weights.K_Gamma * (state.states[r].eta.boundary.at1 - cfg.targets.eta_Gamma_ad[r].at1)};
    Vec k_i(mesh.n_nodes(), 0.0);
    const Vec th_full = state.states[r].theta.full();
    for (int j = 1; j < mesh.n_cells; ++j)
      k_i[j] = cfg.weights.Lambda * (th_full[j] - cfg.targets.theta_ad[r][j]);
    raw.k[i] = std::move(k_i);
  }

  LinearTriple zero_init{BulkBoundaryFn::from_bulk(mesh, Vec(mesh.n_nodes(), 0.0)), GridFn0(mesh)};
  LinearTrajectory fwd = solve_P(zero_init, rq, to_forcing(mesh, raw), mesh, tg, cfg.nu, cfg.mass);
  fwd.states = time_reverse(fwd.states);
  return fwd;
}

LinearTrajectory solve_sensitivity(const StateTrajectory& state, const ProblemConfig& cfg,
                                   const ControlTriple& direction) {
  const Mesh1D& mesh = cfg.mesh;
  CoefficientQuintet q = coeffs_from_state(state, cfg.eps, cfg);
  const int nn = cfg.time.n_nodes();
  RawForcing raw;
  raw.h.resize(nn);
  raw.hG.resize(nn);
  raw.k.resize(nn);
  for (int i = 0; i < nn; ++i) {
    Vec h_i(mesh.n_nodes()), k_i(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      h_i[j] = cfg.weights.L * direction.u[i][j];
      k_i[j] = cfg.weights.M * direction.v[i][j];
    }
    raw.h[i] = std::move(h_i);
    raw.k[i] = std::move(k_i);
    raw.hG[i] = BoundaryPair{cfg.weights.L_Gamma * direction.u_Gamma[i].at0,
                             cfg.weights.L_Gamma * direction.u_Gamma[i].at1};
  }
  LinearTriple zero_init{BulkBoundaryFn::from_bulk(mesh, Vec(mesh.n_nodes(), 0.0)), GridFn0(mesh)};
  return solve_P(zero_init, q, to_forcing(mesh, raw), mesh, cfg.time, cfg.nu, cfg.mass);
}

double cost(const StateTrajectory& state, const ControlTriple& controls, const ProblemConfig& cfg) {
  check_targets(cfg, "cost");
  const Mesh1D& mesh = cfg.mesh;
  const TimeGrid& tg = cfg.time;
  const Weights& w = cfg.weights;
  double J = 0.0;
  for (int i = 1; i <= tg.steps; ++i) {
    Vec de(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j)
      de[j] = state.states[i].eta.bulk[j] - cfg.targets.eta_ad[i][j];
    double term = 0.5 * w.K * inner_H(mesh, cfg.mass, de, de);
    const double g0 = state.states[i].eta.boundary.at0 - cfg.targets.eta_Gamma_ad[i].at0;
    const double g1 = state.states[i].eta.boundary.at1 - cfg.targets.eta_Gamma_ad[i].at1;
    term += 0.5 * w.K_Gamma * (g0 * g0 + g1 * g1);
    Vec dth = state.states[i].theta.full();
    for (int j = 0; j < mesh.n_nodes(); ++j) dth[j] -= cfg.targets.theta_ad[i][j];
    term += 0.5 * w.Lambda * inner_H(mesh, cfg.mass, dth, dth);
    term += 0.5 * w.L * inner_H(mesh, cfg.mass, controls.u[i], controls.u[i]);
    term += 0.5 * w.L_Gamma * (controls.u_Gamma[i].at0 * controls.u_Gamma[i].at0 +
                               controls.u_Gamma[i].at1 * controls.u_Gamma[i].at1);
    term += 0.5 * w.M * inner_H(mesh, cfg.mass, controls.v[i], controls.v[i]);
    J += tg.tau * term;
  }
  return J;
}

GradientTriple gradient(const StateTrajectory& state, const LinearTrajectory& adjoint,
                        const ControlTriple& controls, const ProblemConfig& cfg) {
  (void)state;
  const Mesh1D& mesh = cfg.mesh;
  const int nn = cfg.time.n_nodes();
  if (static_cast<int>(adjoint.states.size()) != nn)
    throw DimensionError("gradient: adjoint trajectory shape mismatch");
  GradientTriple g = ControlTriple::zero(mesh, cfg.time);
  // the cost quadrature samples each interval at its right endpoint; under time
  // reversal that sample is the backward interpolant's value at node i-1
  for (int i = 1; i < nn; ++i) {
    const LinearTriple& adj = adjoint.states[i - 1];
    for (int j = 0; j < mesh.n_nodes(); ++j)
      g.u[i][j] = cfg.weights.L * (controls.u[i][j] + adj.p.bulk[j]);
    g.u_Gamma[i] =
        BoundaryPair{cfg.weights.L_Gamma * (controls.u_Gamma[i].at0 + adj.p.boundary.at0),
                     cfg.weights.L_Gamma * (controls.u_Gamma[i].at1 + adj.p.boundary.at1)};
    const Vec zfull = adj.z.full();
    for (int j = 0; j < mesh.n_nodes(); ++j)
      g.v[i][j] = cfg.weights.M * (controls.v[i][j] + zfull[j]);
  }
  return g;
}

double control_inner(const ControlTriple& a, const ControlTriple& b, const ProblemConfig& cfg) {
  const Mesh1D& mesh = cfg.mesh;
  const TimeGrid& tg = cfg.time;
  double s = 0.0;
  for (int i = 1; i <= tg.steps; ++i) {
    s += tg.tau * inner_H(mesh, cfg.mass, a.u[i], b.u[i]);
    s += tg.tau * (a.u_Gamma[i].at0 * b.u_Gamma[i].at0 + a.u_Gamma[i].at1 * b.u_Gamma[i].at1);
    s += tg.tau * inner_H(mesh, cfg.mass, a.v[i], b.v[i]);
  }
  return s;
}

double control_norm(const ControlTriple& a, const ProblemConfig& cfg) {
  return std::sqrt(std::max(0.0, control_inner(a, a, cfg)));
}

double conjugacy_check(const StateTrajectory& state, const ProblemConfig& cfg,
                       const ControlTriple& u_triple, const ControlTriple& h_triple) {
  const Mesh1D& mesh = cfg.mesh;
  const TimeGrid& tg = cfg.time;
  const int N = tg.steps;
  CoefficientQuintet q = coeffs_from_state(state, cfg.eps, cfg);

  auto run_forward = [&](const ControlTriple& f) {
    RawForcing raw;
    raw.h.assign(N + 1, Vec(mesh.n_nodes(), 0.0));
    raw.hG.resize(N + 1);
    raw.k.assign(N + 1, Vec(mesh.n_nodes(), 0.0));
    for (int i = 0; i <= N; ++i) {
      raw.h[i] = f.u[i];
      raw.hG[i] = f.u_Gamma[i];
      raw.k[i] = f.v[i];
      raw.k[i].front() = 0.0;
      raw.k[i].back() = 0.0;
    }
    LinearTriple zero_init{BulkBoundaryFn::from_bulk(mesh, Vec(mesh.n_nodes(), 0.0)),
                           GridFn0(mesh)};
    return solve_P(zero_init, q, to_forcing(mesh, raw), mesh, tg, cfg.nu, cfg.mass);
  };

  auto run_adjoint_of = [&](const ControlTriple& f) {
    CoefficientQuintet rq;
    rq.mu = time_reverse(q.mu);
    rq.omega = time_reverse(q.omega);
    rq.A = time_reverse(q.A);
    rq.a.reserve(N + 1);
    rq.b.reserve(N + 1);
    const double Tg = tg.t_end();
    for (int i = 0; i <= N; ++i) {
      const double t = Tg - tg.t(i);
      Vec a_i(mesh.n_nodes()), b_i(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) {
        a_i[j] = cfg.material.alpha0(t, mesh.node(j));
        b_i[j] = -cfg.material.alpha0_dt(t, mesh.node(j));
      }
      rq.a.push_back(std::move(a_i));
      rq.b.push_back(std::move(b_i));
    }
    rq.a_W1inf = cfg.material.alpha0_W1inf;
    rq.measure(mesh, cfg.mass);

    RawForcing raw;
    raw.h.resize(N + 1);
    raw.hG.resize(N + 1);
    raw.k.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
      const int r = N - i;
      raw.h[i] = f.u[r];
      raw.hG[i] = f.u_Gamma[r];
      raw.k[i] = f.v[r];
      raw.k[i].front() = 0.0;
      raw.k[i].back() = 0.0;
    }
    LinearTriple zero_init{BulkBoundaryFn::from_bulk(mesh, Vec(mesh.n_nodes(), 0.0)),
                           GridFn0(mesh)};
    LinearTrajectory fwd = solve_P(zero_init, rq, to_forcing(mesh, raw), mesh, tg, cfg.nu, cfg.mass);
    fwd.states = time_reverse(fwd.states);
    return fwd;
  };

  auto traj_as_controls = [&](const LinearTrajectory& t) {
    ControlTriple c = ControlTriple::zero(mesh, tg);
    for (int i = 0; i <= N; ++i) {
      c.u[i] = t.states[i].p.bulk;
      c.u_Gamma[i] = t.states[i].p.boundary;
      c.v[i] = t.states[i].z.full();
    }
    return c;
  };

  const ControlTriple Pstar_u = traj_as_controls(run_adjoint_of(u_triple));
  const ControlTriple P_h = traj_as_controls(run_forward(h_triple));
  const double lhs = control_inner(Pstar_u, h_triple, cfg);
  const double rhs = control_inner(u_triple, P_h, cfg);
  const double scale = control_norm(Pstar_u, cfg) * control_norm(h_triple, cfg) +
                       control_norm(u_triple, cfg) * control_norm(P_h, cfg) + 1e-300;
  return std::abs(lhs - rhs) / scale;
}

}  // namespace kwc

#include "kwc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kwc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void GronwallInstance::check() const {
  if (!(c >= 0.0)) throw ConfigError("gronwall: c must be >= 0");
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("gronwall: tau in (0,1)");
  if (!(c * tau < 2.0)) throw ConfigError("gronwall: hypothesis 0 < c tau < 2 violated");
  if (!((N - 1) * tau < T && T <= N * tau)) throw ConfigError("gronwall: N inconsistent with T, tau");
  if (static_cast<int>(P.size()) != N + 1 || static_cast<int>(Q.size()) != N + 1)
    throw DimensionError("gronwall: sequence lengths");
  for (double v : P)
    if (!(v >= 0.0)) throw ConfigError("gronwall: P must be nonnegative");
  for (int i = 1; i <= N; ++i) {
    if (!(Q[i] >= 0.0)) throw ConfigError("gronwall: Q must be nonnegative");
    const double lhs = (P[i] - P[i - 1]) / tau;
    const double rhs = 0.5 * c * (P[i] + P[i - 1]) + Q[i];
    if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs)))
      throw ConfigError("gronwall: recursion hypothesis fails at i = " + std::to_string(i));
  }
}

double discrete_gronwall_bound(const GronwallInstance& inst) {
  if (!(inst.c * inst.tau < 2.0))
    throw ConfigError("discrete_gronwall_bound: hypothesis c tau < 2 violated");
  double qsum = 0.0;
  for (int i = 1; i <= inst.N; ++i) qsum += inst.Q[i];
  return 2.0 * std::exp(1.5 * inst.c * inst.T) * (inst.P[0] + inst.tau * qsum);
}

GronwallInstance gronwall_equality_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  GronwallInstance g;
  g.c = 60.0 * uni(rng);
  // keep c tau <= 2/3 and the step count moderate
  const double tau_max = std::min(0.9, (g.c > 0.0 ? (2.0 / 3.0) / g.c : 0.9));
  g.tau = tau_max * (0.1 + 0.9 * uni(rng));
  const int N = 2 + static_cast<int>(uni(rng) * 200);
  g.N = N;
  // any T in ((N-1) tau, N tau]
  g.T = g.tau * (N - 1 + 0.05 + 0.95 * uni(rng));
  g.P.assign(N + 1, 0.0);
  g.Q.assign(N + 1, 0.0);
  g.P[0] = 10.0 * uni(rng);
  for (int i = 1; i <= N; ++i) {
    g.Q[i] = 5.0 * uni(rng);
    g.P[i] = ((1.0 + 0.5 * g.c * g.tau) * g.P[i - 1] + g.tau * g.Q[i]) / (1.0 - 0.5 * g.c * g.tau);
  }
  return g;
}

double check_mosco_bound(double eps1, double eps2, const Vec& xis) {
  double worst = -std::numeric_limits<double>::infinity();
  const Epsilon e1(eps1), e2(eps2);
  for (double xi : xis)
    worst = std::max(worst, std::abs(f_eps(e1, xi) - f_eps(e2, xi)) - std::abs(eps1 - eps2));
  return worst;
}

double mosco_random_sweep(int n_samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ueps(0.0, 5.0), uxi(-10.0, 10.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const double e1 = ueps(rng), e2 = ueps(rng), xi = uxi(rng);
    worst = std::max(worst, std::abs(f_eps(Epsilon(e1), xi) - f_eps(Epsilon(e2), xi)) -
                                std::abs(e1 - e2));
  }
  return worst;
}

DissipationReport check_energy_dissipation(const StateTrajectory& traj, const ProblemConfig& cfg,
                                           double C) {
  DissipationReport rep;
  if (traj.energy.empty()) throw ConfigError("check_energy_dissipation: trajectory lacks energy records");
  const double E0 = traj.energy[0].phi + traj.energy[0].ghat;
  rep.tolerance = C * (cfg.time.tau + cfg.mesh.h * cfg.mesh.h) * std::abs(E0);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= traj.steps; ++i) {
    const double Ei = traj.energy[i].phi + traj.energy[i].ghat;
    const double Ep = traj.energy[i - 1].phi + traj.energy[i - 1].ghat;
    const double lhs = traj.energy[i].dissipation + (Ei - Ep) / cfg.time.tau;
    const double margin = traj.energy[i].work + rep.tolerance - lhs;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_step = i;
    }
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

double fit_order(const Vec& params, const Vec& errors) {
  if (params.size() != errors.size() || params.size() < 2)
    throw DimensionError("fit_order: need matching lists with >= 2 levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double x = std::log(params[i]);
    const double y = std::log(std::max(errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

CoefficientQuintet trivial_quintet(const Mesh1D& mesh, const TimeGrid& tg, MassKind mass) {
  CoefficientQuintet q;
  const int nn = tg.n_nodes();
  q.a.assign(nn, Vec(mesh.n_nodes(), 1.0));
  q.b.assign(nn, Vec(mesh.n_nodes(), 0.0));
  q.mu.assign(nn, Vec(mesh.n_nodes(), 0.0));
  q.omega.assign(nn, Vec(mesh.n_cells, 0.0));
  q.A.assign(nn, Vec(mesh.n_cells, 0.0));
  q.a_W1inf = 1.0;
  q.measure(mesh, mass);
  return q;
}

}  // namespace

ConvergenceStudy study_linear_temporal(const std::vector<double>& taus, int cells, double T) {
  ConvergenceStudy st;
  const Mesh1D mesh(cells);
  for (double tau : taus) {
    const TimeGrid tg = TimeGrid::with_tau(T, tau);
    const CoefficientQuintet q = trivial_quintet(mesh, tg, MassKind::lumped);
    ForcingTriple f = ForcingTriple::zero(mesh, tg.n_nodes());
    for (int i = 0; i <= tg.steps; ++i) {
      const double v = -std::exp(-tg.t(i));
      f.h[i].assign(mesh.n_nodes(), v);
      f.h_Gamma[i] = BoundaryPair{v, v};
    }
    LinearTriple init{BulkBoundaryFn::from_bulk(mesh, Vec(mesh.n_nodes(), 1.0)), GridFn0(mesh)};
    const LinearTrajectory traj = solve_P(init, q, f, mesh, tg, 1.0, MassKind::lumped);
    double err_sq = 0.0;
    for (int i = 1; i <= tg.steps; ++i) {
      Vec e(mesh.n_nodes());
      const double exact = std::exp(-tg.t(i));
      for (int j = 0; j < mesh.n_nodes(); ++j) e[j] = traj.states[i].p.bulk[j] - exact;
      err_sq += tg.tau * inner_H(mesh, MassKind::lumped, e, e);
    }
    st.params.push_back(tau);
    st.errors.push_back(std::sqrt(err_sq));
  }
  st.order = fit_order(st.params, st.errors);
  return st;
}

ConvergenceStudy study_linear_spatial(const std::vector<int>& cells, double T) {
  ConvergenceStudy st;
  for (int n : cells) {
    const Mesh1D mesh(n);
    const double tau = 0.4 * mesh.h * mesh.h;
    const TimeGrid tg = TimeGrid::with_tau(T, tau);
    const CoefficientQuintet q = trivial_quintet(mesh, tg, MassKind::consistent);
    ForcingTriple f = ForcingTriple::zero(mesh, tg.n_nodes());
    for (int i = 0; i <= tg.steps; ++i) {
      const double et = std::exp(-tg.t(i));
      for (int j = 0; j < mesh.n_nodes(); ++j)
        f.h[i][j] = (kPi * kPi - 1.0) * et * std::cos(kPi * mesh.node(j));
      f.h_Gamma[i] = BoundaryPair{-et * std::cos(0.0), -et * std::cos(kPi)};
    }
    Vec p0(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j) p0[j] = std::cos(kPi * mesh.node(j));
    LinearTriple init{BulkBoundaryFn::from_bulk(mesh, p0), GridFn0(mesh)};
    const LinearTrajectory traj = solve_P(init, q, f, mesh, tg, 1.0, MassKind::consistent);
    const int i_end = tg.steps;
    Vec e(mesh.n_nodes());
    const double et = std::exp(-tg.t(i_end));
    for (int j = 0; j < mesh.n_nodes(); ++j)
      e[j] = traj.states[i_end].p.bulk[j] - et * std::cos(kPi * mesh.node(j));
    st.params.push_back(mesh.h);
    st.errors.push_back(norm_H(mesh, MassKind::consistent, e));
  }
  st.order = fit_order(st.params, st.errors);
  return st;
}

ConvergenceStudy study_state_manufactured(const std::vector<int>& levels_cells, double T) {
  ConvergenceStudy st;
  for (int n : levels_cells) {
    ProblemConfig cfg;
    cfg.mesh = Mesh1D(n);
    cfg.time = TimeGrid::with_tau(T, T / n);  // tau ~ h keeps the O(tau) term dominant
    cfg.nu = 1.0;
    cfg.eps = Epsilon(0.1);
    cfg.material = builtin_constant_alpha(1.0);
    cfg.weights.L = 1.0;
    cfg.weights.L_Gamma = 1.0;
    cfg.targets = TargetTriple::zero(cfg.mesh, cfg.time);
    ControlTriple u = ControlTriple::zero(cfg.mesh, cfg.time);
    for (int i = 0; i <= cfg.time.steps; ++i) {
      const double v = -std::exp(-cfg.time.t(i));
      u.u[i].assign(cfg.mesh.n_nodes(), v);
      u.u_Gamma[i] = BoundaryPair{v, v};
    }
    StateTriple init{BulkBoundaryFn::from_bulk(cfg.mesh, Vec(cfg.mesh.n_nodes(), 1.0)),
                     GridFn0(cfg.mesh)};
    const StateTrajectory traj = solve_state(init, u, cfg);
    double err = 0.0;
    for (int i = 1; i <= cfg.time.steps; ++i) {
      const double exact = std::exp(-cfg.time.t(i));
      for (int j = 0; j < cfg.mesh.n_nodes(); ++j)
        err = std::max(err, std::abs(traj.states[i].eta.bulk[j] - exact));
    }
    st.params.push_back(cfg.time.tau);
    st.errors.push_back(err);
  }
  st.order = fit_order(st.params, st.errors);
  return st;
}

ConvergenceStudy study_state_spatial(const std::vector<int>& cells, double T) {
  ConvergenceStudy st;
  for (int n : cells) {
    ProblemConfig cfg;
    cfg.mesh = Mesh1D(n);
    cfg.time = TimeGrid::with_tau(T, 0.4 * cfg.mesh.h * cfg.mesh.h);
    cfg.nu = 1.0;
    cfg.eps = Epsilon(0.1);
    cfg.material = builtin_constant_alpha(1.0);
    cfg.mass = MassKind::consistent;
    cfg.weights.L = 1.0;
    cfg.weights.L_Gamma = 1.0;
    cfg.targets = TargetTriple::zero(cfg.mesh, cfg.time);

    // eta = exp(-t) cos(pi x): u = (pi^2 - 1) eta, u_Gamma = -eta|_Gamma
    ControlTriple u = ControlTriple::zero(cfg.mesh, cfg.time);
    for (int i = 0; i <= cfg.time.steps; ++i) {
      const double et = std::exp(-cfg.time.t(i));
      for (int j = 0; j < cfg.mesh.n_nodes(); ++j)
        u.u[i][j] = (kPi * kPi - 1.0) * et * std::cos(kPi * cfg.mesh.node(j));
      u.u_Gamma[i] = BoundaryPair{-et, et};
    }
    Vec eta0(cfg.mesh.n_nodes());
    for (int j = 0; j < cfg.mesh.n_nodes(); ++j) eta0[j] = std::cos(kPi * cfg.mesh.node(j));
    StateTriple init{BulkBoundaryFn::from_bulk(cfg.mesh, eta0), GridFn0(cfg.mesh)};
    cfg.solver.record_energy = false;
    const StateTrajectory traj = solve_state(init, u, cfg);

    const int i_end = cfg.time.steps;
    const double et = std::exp(-cfg.time.t(i_end));
    Vec e(cfg.mesh.n_nodes());
    for (int j = 0; j < cfg.mesh.n_nodes(); ++j)
      e[j] = traj.states[i_end].eta.bulk[j] - et * std::cos(kPi * cfg.mesh.node(j));
    st.params.push_back(cfg.mesh.h);
    st.errors.push_back(norm_H(cfg.mesh, MassKind::consistent, e));
  }
  st.order = fit_order(st.params, st.errors);
  return st;
}

DependenceReport check_continuous_dependence(const LinearTriple& init1, const ForcingTriple& f1,
                                             const LinearTriple& init2, const ForcingTriple& f2,
                                             const CoefficientQuintet& q, const Mesh1D& mesh,
                                             const TimeGrid& tg, double nu, MassKind mass) {
  const LinearTrajectory t1 = solve_P(init1, q, f1, mesh, tg, nu, mass);
  const LinearTrajectory t2 = solve_P(init2, q, f2, mesh, tg, nu, mass);

  const EstimateConstants consts = constants(q, nu, tg.t_end());
  DependenceReport rep;
  double max_pX = 0.0, max_az = 0.0, sum_diss = 0.0, sum_h = 0.0, sum_k = 0.0;
  for (int i = 0; i <= tg.steps; ++i) {
    Vec dp(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j)
      dp[j] = t1.states[i].p.bulk[j] - t2.states[i].p.bulk[j];
    BulkBoundaryFn dpf = BulkBoundaryFn::from_bulk(mesh, dp);
    Vec dz(mesh.n_interior());
    for (int j = 0; j < mesh.n_interior(); ++j)
      dz[j] = t1.states[i].z.interior[j] - t2.states[i].z.interior[j];
    GridFn0 dzf(mesh, dz);

    max_pX = std::max(max_pX, std::pow(norm_X(mesh, mass, dpf), 2));
    const Tridiag Wa = weighted_mass_interior(mesh, mass, q.a[i]);
    const Vec wz = Wa.apply(dzf.interior);
    double az = 0.0;
    for (std::size_t j = 0; j < wz.size(); ++j) az += wz[j] * dzf.interior[j];
    max_az = std::max(max_az, az);
    if (i >= 1)
      sum_diss += tg.tau * (std::pow(norm_W(mesh, mass, dpf), 2) +
                            nu * nu * std::pow(norm_V0(mesh, dzf), 2));
    if (i >= 1) {
      Vec dh(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) dh[j] = f1.h[i][j] - f2.h[i][j];
      const double g0 = f1.h_Gamma[i].at0 - f2.h_Gamma[i].at0;
      const double g1 = f1.h_Gamma[i].at1 - f2.h_Gamma[i].at1;
      sum_h += tg.tau * (inner_H(mesh, mass, dh, dh) + g0 * g0 + g1 * g1);
      Vec dk(mesh.n_interior());
      for (int j = 0; j < mesh.n_interior(); ++j) dk[j] = f1.k[i].interior[j] - f2.k[i].interior[j];
      sum_k += tg.tau * std::pow(dual_norm_V0_of_density(mesh, mass, GridFn0(mesh, dk)), 2);
    }
  }
  Vec dp0(mesh.n_nodes());
  for (int j = 0; j < mesh.n_nodes(); ++j) dp0[j] = init1.p.bulk[j] - init2.p.bulk[j];
  const BulkBoundaryFn dp0f = BulkBoundaryFn::from_bulk(mesh, dp0);
  Vec dz0(mesh.n_interior());
  for (int j = 0; j < mesh.n_interior(); ++j) dz0[j] = init1.z.interior[j] - init2.z.interior[j];
  const Tridiag Wa0 = weighted_mass_interior(mesh, mass, q.a[0]);
  const Vec wz0 = Wa0.apply(dz0);
  double az0 = 0.0;
  for (std::size_t j = 0; j < wz0.size(); ++j) az0 += wz0[j] * dz0[j];

  rep.lhs = max_pX + max_az + sum_diss;
  rep.rhs = 2.0 * consts.C0 * std::exp(consts.C0 * tg.t_end()) *
            (std::pow(norm_X(mesh, mass, dp0f), 2) + az0 + sum_h + sum_k);
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-9) + 1e-12;
  return rep;
}

CoefficientQuintet random_smooth_quintet(std::mt19937_64& rng, const Mesh1D& mesh,
                                         const TimeGrid& tg, MassKind mass) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double ca = uni(rng), cb = uni(rng), cm = uni(rng), co = uni(rng), cA = uni(rng);
  const double wa = uni(rng), wb = uni(rng);
  CoefficientQuintet q;
  const int nn = tg.n_nodes();
  q.a.resize(nn);
  q.b.resize(nn);
  q.mu.resize(nn);
  q.omega.resize(nn);
  q.A.resize(nn);
  for (int i = 0; i < nn; ++i) {
    const double t = tg.t(i);
    q.a[i].resize(mesh.n_nodes());
    q.b[i].resize(mesh.n_nodes());
    q.mu[i].resize(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      const double x = mesh.node(j);
      q.a[i][j] = 1.0 + 0.3 * ca * std::sin(kPi * x) * std::cos(wa * t);
      q.b[i][j] = 0.5 * cb * std::cos(kPi * x) * std::sin(1.0 + wb * t);
      q.mu[i][j] = 0.8 * cm * std::sin(2.0 * kPi * x + t);
    }
    q.omega[i].resize(mesh.n_cells);
    q.A[i].resize(mesh.n_cells);
    for (int c = 0; c < mesh.n_cells; ++c) {
      const double x = mesh.mid(c);
      q.omega[i][c] = 0.5 * co * std::cos(kPi * x - t);
      q.A[i][c] = 0.5 * (1.0 + cA * std::sin(kPi * x + t));  // >= 0
    }
  }
  // |a|_W1inf: value <= 1.3, dx <= 0.3 pi, dt <= 0.3 |wa|
  q.a_W1inf = std::max({1.3, 0.3 * kPi, 0.3 * std::abs(wa)});
  q.measure(mesh, mass);
  return q;
}

ForcingTriple random_smooth_forcing(std::mt19937_64& rng, const Mesh1D& mesh, const TimeGrid& tg) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double c1 = uni(rng), c2 = uni(rng), c3 = uni(rng), w1 = uni(rng);
  ForcingTriple f = ForcingTriple::zero(mesh, tg.n_nodes());
  for (int i = 0; i < tg.n_nodes(); ++i) {
    const double t = tg.t(i);
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      const double x = mesh.node(j);
      f.h[i][j] = c1 * std::sin(kPi * x + w1 * t) + 0.3 * c2 * std::cos(2.0 * kPi * x);
    }
    f.h_Gamma[i] = BoundaryPair{0.5 * c2 * std::cos(t), 0.5 * c3 * std::sin(1.0 + t)};
    Vec k(mesh.n_interior());
    for (int j = 0; j < mesh.n_interior(); ++j)
      k[j] = c3 * std::sin(2.0 * kPi * mesh.node(j + 1)) * std::cos(w1 * t);
    f.k[i] = GridFn0(mesh, k);
  }
  return f;
}

LinearTriple random_smooth_init(std::mt19937_64& rng, const Mesh1D& mesh) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double c1 = uni(rng), c2 = uni(rng);
  Vec p0(mesh.n_nodes());
  for (int j = 0; j < mesh.n_nodes(); ++j)
    p0[j] = c1 * std::cos(kPi * mesh.node(j)) + 0.5 * c2;
  Vec z0(mesh.n_interior());
  for (int j = 0; j < mesh.n_interior(); ++j) z0[j] = c2 * std::sin(kPi * mesh.node(j + 1));
  return LinearTriple{BulkBoundaryFn::from_bulk(mesh, p0), GridFn0(mesh, z0)};
}

ControlTriple random_smooth_controls(std::mt19937_64& rng, const Mesh1D& mesh, const TimeGrid& tg,
                                     double amplitude) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double c1 = uni(rng), c2 = uni(rng), c3 = uni(rng), w1 = uni(rng), w2 = uni(rng);
  ControlTriple u = ControlTriple::zero(mesh, tg);
  for (int i = 0; i < tg.n_nodes(); ++i) {
    const double t = tg.t(i);
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      const double x = mesh.node(j);
      u.u[i][j] = amplitude * (c1 * std::sin(kPi * x + w1 * t) + 0.4 * c2 * std::cos(kPi * x));
      u.v[i][j] = amplitude * c3 * std::sin(kPi * x) * std::cos(w2 * t);
    }
    u.u_Gamma[i] = BoundaryPair{amplitude * 0.5 * c2 * std::cos(t),
                                amplitude * 0.5 * c1 * std::sin(0.7 + t)};
  }
  return u;
}

}  // namespace kwc

#include <cmath>
#include <random>

#include "doctest.h"
#include "kwc/linear.hpp"
#include "kwc/verify.hpp"

using namespace kwc;

namespace {

constexpr double kPi = 3.14159265358979323846;

CoefficientQuintet const_quintet(const Mesh1D& mesh, int nn, double a_val) {
  CoefficientQuintet q;
  q.a.assign(nn, Vec(mesh.n_nodes(), a_val));
  q.b.assign(nn, Vec(mesh.n_nodes(), 0.0));
  q.mu.assign(nn, Vec(mesh.n_nodes(), 0.0));
  q.omega.assign(nn, Vec(mesh.n_cells, 0.0));
  q.A.assign(nn, Vec(mesh.n_cells, 0.0));
  q.a_W1inf = a_val;
  q.measure(mesh, MassKind::lumped);
  return q;
}

LinearTriple zero_triple(const Mesh1D& mesh) {
  return LinearTriple{BulkBoundaryFn::from_bulk(mesh, Vec(mesh.n_nodes(), 0.0)), GridFn0(mesh)};
}

}  // namespace

TEST_CASE("tau0 formula") {
  Mesh1D mesh(8);
  CoefficientQuintet q = const_quintet(mesh, 1, 1.0);
  CHECK(tau0(q, 1.0) == doctest::Approx(1.0 / 16.0));
  CHECK(tau0(q, 0.5) == doctest::Approx(0.25 / 16.0));

  CoefficientQuintet q2 = q;
  q2.omega_inf = 1.0;
  CHECK(tau0(q2, 1.0) < tau0(q, 1.0));
  q2.omega_inf = 2.0;
  CHECK(tau0(q2, 1.0) == doctest::Approx(1.0 / (16.0 * 5.0)));
}

TEST_CASE("estimate constants") {
  Mesh1D mesh(8);
  CoefficientQuintet q = const_quintet(mesh, 1, 1.0);
  const double T = 0.37;
  const EstimateConstants ec = constants(q, 1.0, T);
  CHECK(ec.C0 == doctest::Approx(32.0));
  CHECK(ec.C1 == doctest::Approx(4.0 * 32.0 * 32.0 * std::exp(48.0 * T)));

  // C0 scales inversely with min{1, nu^2, delta*(a)} when delta* is the minimum
  CoefficientQuintet qh = q;
  qh.delta_star_a = 0.5;
  CHECK(constants(qh, 1.0, T).C0 == doctest::Approx(2.0 * (16.0 * 2.0) / 1.0));
}

TEST_CASE("step: zero data stays zero, refusal above 2 tau0") {
  Mesh1D mesh(16);
  CoefficientQuintet q = const_quintet(mesh, 2, 1.0);
  const double t0 = tau0(q, 1.0);
  const LinearTriple prev = zero_triple(mesh);
  const LinearTriple out =
      solve_step(prev, q.a[1], q.b[1], q.mu[1], q.omega[1], q.A[1], Vec(mesh.n_nodes(), 0.0),
                 BoundaryPair{}, GridFn0(mesh), 0.5 * t0, 1.0, mesh, MassKind::lumped, t0, 1);
  for (double v : out.p.bulk) CHECK(v == 0.0);
  for (double v : out.z.interior) CHECK(v == 0.0);

  CHECK_THROWS_AS(solve_step(prev, q.a[1], q.b[1], q.mu[1], q.omega[1], q.A[1],
                             Vec(mesh.n_nodes(), 0.0), BoundaryPair{}, GridFn0(mesh), 2.1 * t0,
                             1.0, mesh, MassKind::lumped, t0, 1),
                  ConfigError);
}

TEST_CASE("omega = 0 decouples: p block equals a standalone heat step") {
  Mesh1D mesh(12);
  const double tau = 0.01, nu = 1.0;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  CoefficientQuintet q = const_quintet(mesh, 2, 1.0);
  for (int j = 0; j < mesh.n_nodes(); ++j) q.mu[1][j] = 0.5 * uni(rng);
  q.measure(mesh, MassKind::lumped);

  Vec p_prev(mesh.n_nodes()), h(mesh.n_nodes());
  for (int j = 0; j < mesh.n_nodes(); ++j) {
    p_prev[j] = uni(rng);
    h[j] = uni(rng);
  }
  Vec z_prev(mesh.n_interior());
  for (double& v : z_prev) v = uni(rng);
  const BoundaryPair hG{uni(rng), uni(rng)};
  const LinearTriple prev{BulkBoundaryFn::from_bulk(mesh, p_prev), GridFn0(mesh, z_prev)};

  Vec mu_used(mesh.n_nodes());
  for (int j = 0; j < mesh.n_nodes(); ++j) mu_used[j] = q.mu[1][j];
  const LinearTriple out = solve_step(prev, q.a[1], q.b[1], mu_used, q.omega[1], q.A[1], h, hG,
                                      GridFn0(mesh), tau, nu, mesh, MassKind::lumped,
                                      tau0(q, nu), 1);

  // standalone tridiagonal solve of the W heat step with the same mu
  Tridiag A = weighted_mass(mesh, MassKind::lumped, Vec(mesh.n_nodes(), 1.0));
  for (int j = 0; j < mesh.n_nodes(); ++j) {
    A.diag[j] /= tau;
  }
  A.diag.front() += 1.0 / tau;
  A.diag.back() += 1.0 / tau;
  A.add(stiffness(mesh));
  A.add(weighted_mass(mesh, MassKind::lumped, mu_used));
  Vec rhs = apply_mass(mesh, MassKind::lumped, p_prev);
  rhs.front() += p_prev.front();
  rhs.back() += p_prev.back();
  for (double& v : rhs) v /= tau;
  const Vec mh = apply_mass(mesh, MassKind::lumped, h);
  for (int j = 0; j < mesh.n_nodes(); ++j) rhs[j] += mh[j];
  rhs.front() += hG.at0;
  rhs.back() += hG.at1;
  const Vec p_ref = A.solve(rhs);
  for (int j = 0; j < mesh.n_nodes(); ++j)
    CHECK(out.p.bulk[j] == doctest::Approx(p_ref[j]).epsilon(1e-12));
}

TEST_CASE("symmetric data produce an even solution about x = 1/2") {
  Mesh1D mesh(16);
  const int nn = 3;
  CoefficientQuintet q = const_quintet(mesh, nn, 1.0);
  for (int i = 0; i < nn; ++i) {
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      const double x = mesh.node(j);
      q.mu[i][j] = 0.3 * std::cos(2.0 * kPi * x);  // even about 1/2
      q.b[i][j] = 0.1 + 0.2 * std::pow(x - 0.5, 2);
    }
    for (int c = 0; c < mesh.n_cells; ++c) {
      const double x = mesh.mid(c);
      q.A[i][c] = 0.5 + std::pow(x - 0.5, 2);
      q.omega[i][c] = 0.0;
    }
  }
  q.measure(mesh, MassKind::lumped);
  ForcingTriple f = ForcingTriple::zero(mesh, nn);
  for (int i = 0; i < nn; ++i) {
    for (int j = 0; j < mesh.n_nodes(); ++j)
      f.h[i][j] = std::cos(2.0 * kPi * mesh.node(j)) + 1.0;
    f.h_Gamma[i] = BoundaryPair{0.7, 0.7};
    Vec k(mesh.n_interior());
    for (int j = 0; j < mesh.n_interior(); ++j) k[j] = std::sin(kPi * mesh.node(j + 1));
    f.k[i] = GridFn0(mesh, k);
  }
  const TimeGrid tg = TimeGrid::with_steps(2.0 * tau0(q, 1.0), 2);
  const LinearTrajectory traj = solve_P(zero_triple(mesh), q, f, mesh, tg, 1.0, MassKind::lumped);
  for (int i = 1; i <= 2; ++i)
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      CHECK(traj.states[i].p.bulk[j] ==
            doctest::Approx(traj.states[i].p.bulk[mesh.n_cells - j]).epsilon(1e-12));
    }
}

TEST_CASE("monolithic step matrix is symmetric (cross blocks are transposes)") {
  Mesh1D mesh(6);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  CoefficientQuintet q = const_quintet(mesh, 2, 1.0);
  for (int j = 0; j < mesh.n_nodes(); ++j) q.mu[1][j] = 0.4 * uni(rng);
  for (int c = 0; c < mesh.n_cells; ++c) {
    q.omega[1][c] = 0.8 * uni(rng);
    q.A[1][c] = 0.5 + 0.4 * uni(rng);
  }
  q.measure(mesh, MassKind::lumped);
  const double tau = 0.25 * tau0(q, 1.0);
  const Vec w = lumped_weights(mesh);
  const int n = mesh.n_nodes(), m = mesh.n_interior();
  const int ndof = n + m;

  // probe the inverse with unit loads; symmetry of A^{-1} certifies symmetry of A
  std::vector<Vec> columns;
  for (int dof = 0; dof < ndof; ++dof) {
    Vec h(mesh.n_nodes(), 0.0);
    BoundaryPair hG{};
    Vec k(mesh.n_interior(), 0.0);
    if (dof < n) {
      h[dof] = 1.0 / w[dof];  // lumped load = unit vector at a p row
    } else {
      k[dof - n] = 1.0 / w[dof - n + 1];
    }
    const LinearTriple out =
        solve_step(zero_triple(mesh), q.a[1], q.b[1], q.mu[1], q.omega[1], q.A[1], h, hG,
                   GridFn0(mesh, k), tau, 1.0, mesh, MassKind::lumped, tau0(q, 1.0), 1);
    Vec col(ndof);
    for (int j = 0; j < n; ++j) col[j] = out.p.bulk[j];
    for (int j = 0; j < m; ++j) col[n + j] = out.z.interior[j];
    columns.push_back(col);
  }
  for (int i = 0; i < ndof; ++i)
    for (int j = 0; j < i; ++j) CHECK(columns[i][j] == doctest::Approx(columns[j][i]).epsilon(1e-9));
}

TEST_CASE("manufactured solution p = exp(-t): first order in time, zero data stays zero") {
  const ConvergenceStudy st = study_linear_temporal({1.0 / 16, 1.0 / 32, 1.0 / 64}, 8, 0.5);
  CHECK(st.order == doctest::Approx(1.0).epsilon(0.12));

  Mesh1D mesh(8);
  const TimeGrid tg = TimeGrid::with_steps(0.1, 4);
  CoefficientQuintet q = const_quintet(mesh, tg.n_nodes(), 1.0);
  const LinearTrajectory traj = solve_P(zero_triple(mesh), q,
                                        ForcingTriple::zero(mesh, tg.n_nodes()), mesh, tg, 1.0,
                                        MassKind::lumped);
  for (int i = 0; i <= tg.steps; ++i) {
    for (double v : traj.states[i].p.bulk) CHECK(v == 0.0);
    for (double v : traj.states[i].z.interior) CHECK(v == 0.0);
  }
}

TEST_CASE("scheme is linear: superposition to machine precision") {
  Mesh1D mesh(10);
  const TimeGrid tg = TimeGrid::with_steps(0.05, 5);
  std::mt19937_64 rng(47);
  CoefficientQuintet q = random_smooth_quintet(rng, mesh, tg, MassKind::lumped);

  const LinearTriple i1 = random_smooth_init(rng, mesh);
  const LinearTriple i2 = random_smooth_init(rng, mesh);
  const ForcingTriple f1 = random_smooth_forcing(rng, mesh, tg);
  const ForcingTriple f2 = random_smooth_forcing(rng, mesh, tg);

  const double al = 0.7, be = -1.3;
  LinearTriple ic{BulkBoundaryFn::from_bulk(mesh, Vec(mesh.n_nodes(), 0.0)), GridFn0(mesh)};
  for (int j = 0; j < mesh.n_nodes(); ++j)
    ic.p.bulk[j] = al * i1.p.bulk[j] + be * i2.p.bulk[j];
  ic.p = BulkBoundaryFn::from_bulk(mesh, ic.p.bulk);
  Vec zc(mesh.n_interior());
  for (int j = 0; j < mesh.n_interior(); ++j)
    zc[j] = al * i1.z.interior[j] + be * i2.z.interior[j];
  ic.z = GridFn0(mesh, zc);
  ForcingTriple fc = ForcingTriple::zero(mesh, tg.n_nodes());
  for (int i = 0; i < tg.n_nodes(); ++i) {
    for (int j = 0; j < mesh.n_nodes(); ++j) fc.h[i][j] = al * f1.h[i][j] + be * f2.h[i][j];
    fc.h_Gamma[i] = BoundaryPair{al * f1.h_Gamma[i].at0 + be * f2.h_Gamma[i].at0,
                                 al * f1.h_Gamma[i].at1 + be * f2.h_Gamma[i].at1};
    Vec k(mesh.n_interior());
    for (int j = 0; j < mesh.n_interior(); ++j)
      k[j] = al * f1.k[i].interior[j] + be * f2.k[i].interior[j];
    fc.k[i] = GridFn0(mesh, k);
  }

  const LinearTrajectory t1 = solve_P(i1, q, f1, mesh, tg, 1.0, MassKind::lumped);
  const LinearTrajectory t2 = solve_P(i2, q, f2, mesh, tg, 1.0, MassKind::lumped);
  const LinearTrajectory tc = solve_P(ic, q, fc, mesh, tg, 1.0, MassKind::lumped);
  for (int i = 0; i <= tg.steps; ++i) {
    for (int j = 0; j < mesh.n_nodes(); ++j)
      CHECK(tc.states[i].p.bulk[j] ==
            doctest::Approx(al * t1.states[i].p.bulk[j] + be * t2.states[i].p.bulk[j])
                .epsilon(1e-10));
    for (int j = 0; j < mesh.n_interior(); ++j)
      CHECK(tc.states[i].z.interior[j] ==
            doctest::Approx(al * t1.states[i].z.interior[j] + be * t2.states[i].z.interior[j])
                .epsilon(1e-10));
  }
}

TEST_CASE("flux-form V0* loads: integration by parts onto the test functions") {
  Mesh1D mesh(16);
  // a cellwise Heaviside flux produces exactly a unit point load at the jump
  Vec F(mesh.n_cells, 0.0);
  for (int c = 8; c < mesh.n_cells; ++c) F[c] = 1.0;
  const Vec load = k_load(mesh, MassKind::lumped, GridFn0(mesh), &F);
  for (int j = 0; j < mesh.n_interior(); ++j)
    CHECK(load[j] == doctest::Approx(j + 1 == 8 ? 1.0 : 0.0));

  // a smooth flux agrees with the H-density of its divergence to O(h^2)
  Mesh1D fine(64);
  Vec Fs(fine.n_cells);
  for (int c = 0; c < fine.n_cells; ++c) Fs[c] = std::sin(kPi * fine.mid(c));
  const Vec flux_load = k_load(fine, MassKind::lumped, GridFn0(fine), &Fs);
  Vec div(fine.n_interior());
  for (int j = 0; j < fine.n_interior(); ++j) div[j] = kPi * std::cos(kPi * fine.node(j + 1));
  const Vec dens_load = k_load(fine, MassKind::lumped, GridFn0(fine, div), nullptr);
  for (int j = 0; j < fine.n_interior(); ++j)
    CHECK(flux_load[j] == doctest::Approx(dens_load[j]).epsilon(2e-3));

  // and the solved trajectories agree at the same order
  const TimeGrid tg = TimeGrid::with_steps(0.05, 5);
  CoefficientQuintet q = const_quintet(fine, tg.n_nodes(), 1.0);
  ForcingTriple f_flux = ForcingTriple::zero(fine, tg.n_nodes());
  f_flux.k_flux.assign(tg.n_nodes(), Fs);
  ForcingTriple f_dens = ForcingTriple::zero(fine, tg.n_nodes());
  for (int i = 0; i < tg.n_nodes(); ++i) f_dens.k[i] = GridFn0(fine, div);
  LinearTriple zi{BulkBoundaryFn::from_bulk(fine, Vec(fine.n_nodes(), 0.0)), GridFn0(fine)};
  const LinearTrajectory t1 = solve_P(zi, q, f_flux, fine, tg, 1.0, MassKind::lumped);
  const LinearTrajectory t2 = solve_P(zi, q, f_dens, fine, tg, 1.0, MassKind::lumped);
  for (int j = 0; j < fine.n_interior(); ++j)
    CHECK(t1.states[tg.steps].z.interior[j] ==
          doctest::Approx(t2.states[tg.steps].z.interior[j]).epsilon(5e-3));
}

TEST_CASE("a-priori bounds hold on manufactured and random runs") {
  // zero data: trivially 0 <= 0
  {
    Mesh1D mesh(8);
    const TimeGrid tg = TimeGrid::with_steps(0.1, 4);
    CoefficientQuintet q = const_quintet(mesh, tg.n_nodes(), 1.0);
    const LinearTrajectory traj = solve_P(zero_triple(mesh), q,
                                          ForcingTriple::zero(mesh, tg.n_nodes()), mesh, tg, 1.0,
                                          MassKind::lumped);
    const AprioriReport rep = check_apriori(traj, zero_triple(mesh), q,
                                            constants(q, 1.0, tg.t_end()), mesh, tg, 1.0,
                                            MassKind::lumped);
    CHECK(rep.step_energy_ok);
    CHECK(rep.step_increment_ok);
    CHECK(rep.integrated_ok);
    CHECK(rep.dt_bounds_ok);
  }
  // randomized smooth problems at tau = tau0 / 2
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 5; ++trial) {
    Mesh1D mesh(32);
    TimeGrid probe = TimeGrid::with_steps(1.0, 8);
    CoefficientQuintet qp = random_smooth_quintet(rng, mesh, probe, MassKind::lumped);
    const double t0 = tau0(qp, 1.0);
    const TimeGrid tg = TimeGrid::with_tau(32 * t0 / 2.0, t0 / 2.0);
    CoefficientQuintet q = random_smooth_quintet(rng, mesh, tg, MassKind::lumped);
    const ForcingTriple f = random_smooth_forcing(rng, mesh, tg);
    const LinearTriple init = random_smooth_init(rng, mesh);
    const LinearTrajectory traj = solve_P(init, q, f, mesh, tg, 1.0, MassKind::lumped);
    const AprioriReport rep = check_apriori(traj, init, q, constants(q, 1.0, tg.t_end()), mesh, tg,
                                            1.0, MassKind::lumped);
    CHECK(rep.step_energy_ok);
    CHECK(rep.step_increment_ok);
    CHECK(rep.integrated_ok);
    CHECK(rep.dt_bounds_ok);
  }
}

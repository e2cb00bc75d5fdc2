#include <cmath>
#include <random>

#include "doctest.h"
#include "kwc/spaces.hpp"

using namespace kwc;

namespace {
constexpr double kPi = 3.14159265358979323846;

Vec nodal(const Mesh1D& mesh, double (*f)(double)) {
  Vec v(mesh.n_nodes());
  for (int j = 0; j < mesh.n_nodes(); ++j) v[j] = f(mesh.node(j));
  return v;
}
}  // namespace

TEST_CASE("mesh and time grid invariants") {
  Mesh1D mesh(4);
  CHECK(mesh.h == doctest::Approx(0.25));
  CHECK(mesh.node(0) == 0.0);
  CHECK(mesh.node(4) == 1.0);
  CHECK_THROWS_AS(Mesh1D(1), ConfigError);

  TimeGrid tg = TimeGrid::with_tau(1.0, 0.3);
  CHECK(tg.steps == 4);  // smallest N with N tau >= T
  CHECK((tg.steps - 1) * tg.tau < tg.T);
  CHECK(tg.T <= tg.steps * tg.tau);
  CHECK_THROWS_AS(TimeGrid::with_tau(1.0, 1.5), ConfigError);
}

TEST_CASE("inner_H examples") {
  Mesh1D mesh(4);
  const Vec ones(mesh.n_nodes(), 1.0);
  const Vec zeros(mesh.n_nodes(), 0.0);
  CHECK(inner_H(mesh, MassKind::lumped, ones, ones) == doctest::Approx(1.0));
  CHECK(inner_H(mesh, MassKind::consistent, ones, ones) == doctest::Approx(1.0));
  CHECK(inner_H(mesh, MassKind::lumped, zeros, ones) == 0.0);

  const Vec x = nodal(mesh, [](double s) { return s; });
  CHECK(inner_H(mesh, MassKind::lumped, x, x) == doctest::Approx(0.34375));

  Vec wrong(3, 1.0);
  CHECK_THROWS_AS(inner_H(mesh, MassKind::lumped, wrong, wrong), DimensionError);
}

TEST_CASE("inner_X examples") {
  Mesh1D mesh(4);
  const BulkBoundaryFn one = BulkBoundaryFn::from_bulk(mesh, Vec(mesh.n_nodes(), 1.0));
  CHECK(inner_X(mesh, MassKind::lumped, one, one) == doctest::Approx(3.0));

  const BulkBoundaryFn zero = BulkBoundaryFn::from_bulk(mesh, Vec(mesh.n_nodes(), 0.0));
  CHECK(inner_X(mesh, MassKind::lumped, zero, one) == 0.0);

  // bulk 0 except boundary nodes (2,3) against (1,1): boundary product contributes 5
  Vec b1(mesh.n_nodes(), 0.0);
  b1.front() = 2.0;
  b1.back() = 3.0;
  Vec b2(mesh.n_nodes(), 0.0);
  b2.front() = 1.0;
  b2.back() = 1.0;
  const BulkBoundaryFn f1 = BulkBoundaryFn::from_bulk(mesh, b1);
  const BulkBoundaryFn f2 = BulkBoundaryFn::from_bulk(mesh, b2);
  const double bulk_part = inner_H(mesh, MassKind::lumped, f1.bulk, f2.bulk);
  CHECK(inner_X(mesh, MassKind::lumped, f1, f2) - bulk_part == doctest::Approx(5.0));
}

TEST_CASE("diff_x examples") {
  Mesh1D mesh(2);
  const Vec x2 = nodal(mesh, [](double s) { return s * s; });
  const Vec d = diff_x(mesh, x2);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == doctest::Approx(0.5));
  CHECK(d[1] == doctest::Approx(1.5));

  Mesh1D fine(17);
  const Vec lin = nodal(fine, [](double s) { return 3.0 * s - 2.0; });
  for (double v : diff_x(fine, lin)) CHECK(v == doctest::Approx(3.0));
  const Vec c(fine.n_nodes(), 7.5);
  for (double v : diff_x(fine, c)) CHECK(v == 0.0);
}

TEST_CASE("dual V0 norm") {
  Mesh1D mesh(64);
  const Vec zero(mesh.n_interior(), 0.0);
  CHECK(dual_norm_V0(mesh, zero) == 0.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vec f(mesh.n_interior());
  for (double& v : f) v = uni(rng);
  Vec f2 = f;
  for (double& v : f2) v *= 2.0;
  CHECK(dual_norm_V0(mesh, f2) == doctest::Approx(2.0 * dual_norm_V0(mesh, f)));

  // load of sin(pi x) approaches |sin(pi x)|_{H^-1} = 1/(pi sqrt(2)) under refinement
  double prev_err = 1e9;
  for (int n : {32, 64, 128, 256}) {
    Mesh1D m(n);
    Vec s(m.n_interior());
    for (int j = 0; j < m.n_interior(); ++j) s[j] = std::sin(kPi * m.node(j + 1));
    const double val = dual_norm_V0_of_density(m, MassKind::lumped, GridFn0(m, s));
    const double err = std::abs(val - 1.0 / (kPi * std::sqrt(2.0)));
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 5e-4);
}

TEST_CASE("inner product properties on random inputs") {
  Mesh1D mesh(16);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec f(mesh.n_nodes()), g(mesh.n_nodes());
    for (int j = 0; j < mesh.n_nodes(); ++j) {
      f[j] = uni(rng);
      g[j] = uni(rng);
    }
    for (MassKind mk : {MassKind::lumped, MassKind::consistent}) {
      const double fg = inner_H(mesh, mk, f, g);
      CHECK(fg == doctest::Approx(inner_H(mesh, mk, g, f)));
      Vec f3(mesh.n_nodes());
      for (int j = 0; j < mesh.n_nodes(); ++j) f3[j] = 3.0 * f[j];
      CHECK(inner_H(mesh, mk, f3, g) == doctest::Approx(3.0 * fg));
      CHECK(std::abs(fg) <= norm_H(mesh, mk, f) * norm_H(mesh, mk, g) + 1e-12);
    }
  }
}

TEST_CASE("trace compatibility is enforced") {
  Mesh1D mesh(4);
  Vec bulk(mesh.n_nodes(), 1.0);
  CHECK_THROWS_AS(BulkBoundaryFn(mesh, bulk, BoundaryPair{0.0, 1.0}), ConfigError);
  CHECK_NOTHROW(BulkBoundaryFn(mesh, bulk, BoundaryPair{1.0, 1.0}));
}

TEST_CASE("discrete Poincare on V0") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int n : {4, 16, 64}) {
    Mesh1D mesh(n);
    for (int trial = 0; trial < 20; ++trial) {
      Vec v(mesh.n_interior());
      for (double& x : v) x = uni(rng);
      GridFn0 f(mesh, v);
      CHECK(norm_H0(mesh, MassKind::lumped, f) <= norm_V0(mesh, f) + 1e-12);
    }
  }
}

TEST_CASE("tridiagonal and banded solvers invert their own application") {
  Mesh1D mesh(12);
  const Tridiag K = stiffness(mesh);
  Tridiag A = weighted_mass(mesh, MassKind::consistent, Vec(mesh.n_nodes(), 1.0));
  A.add(K, 0.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vec x(mesh.n_nodes());
  for (double& v : x) v = uni(rng);
  const Vec b = A.apply(x);
  const Vec x2 = A.solve(b);
  for (int j = 0; j < mesh.n_nodes(); ++j) CHECK(x2[j] == doctest::Approx(x[j]));

  BandMatrix B(5, 2, 2);
  for (int i = 0; i < 5; ++i) B.at(i, i) = 4.0 + i;
  B.at(0, 1) = 1.0;
  B.at(1, 0) = -2.0;
  B.at(2, 4) = 0.5;
  B.at(4, 2) = 0.25;
  std::vector<double> xb = {1.0, -1.0, 2.0, 0.5, -0.25};
  std::vector<double> rb(5, 0.0);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) rb[i] += B.get(i, j) * xb[j];
  const std::vector<double> sol = B.solve(rb);
  for (int i = 0; i < 5; ++i) CHECK(sol[i] == doctest::Approx(xb[i]));
}

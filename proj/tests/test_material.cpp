#include <cmath>
#include <random>

#include "doctest.h"
#include "kwc/material.hpp"

using namespace kwc;

namespace {

Vec sample_grid(double lo, double hi, int n) {
  Vec g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1.0);
  return g;
}

}  // namespace

TEST_CASE("builtin default values") {
  const MaterialModel m = builtin_default();
  CHECK(m.alpha(0.0) == doctest::Approx(1.5));
  CHECK(m.g(0.0) == doctest::Approx(0.0));
  CHECK(m.G(0.0) == doctest::Approx(0.0));
  CHECK(m.alpha_prime(0.0) == 0.0);
  CHECK(m.alpha0(0.3, 0.7) == 1.0);
}

TEST_CASE("every shipped builtin passes validation") {
  const Vec grid = sample_grid(-10.0, 10.0, 10000);
  for (const std::string& name : material_catalog()) {
    const MaterialModel m = material_by_name(name);
    const ValidationReport rep = validate(m, grid, 1e-6);
    for (const auto& item : rep.items) {
      INFO(name, ": ", item.check, " worst ", item.worst);
      CHECK(item.pass);
    }
  }
}

TEST_CASE("validator flags assumption violations") {
  MaterialModel bad = builtin_default();
  bad.alpha = [](double e) { return e * e; };
  bad.alpha_prime = [](double e) { return 2.0 * e; };
  bad.alpha_double_prime = [](double) { return 2.0; };
  const ValidationReport rep = validate(bad, sample_grid(-10.0, 10.0, 2001), 1e-6);
  bool pos_fail = false, lip_fail = false;
  for (const auto& it : rep.items) {
    if (it.check == "alpha >= delta_star" && !it.pass) pos_fail = true;
    if (it.check == "alpha' in Linf" && !it.pass) lip_fail = true;
  }
  CHECK(pos_fail);  // alpha(0) = 0 < delta_star
  CHECK(lip_fail);  // alpha' = 2 eta unbounded on the grid

  MaterialModel badG = builtin_default();
  badG.G = [](double) { return -1.0; };
  badG.g = [](double) { return 0.0; };
  badG.g_prime = [](double) { return 0.0; };
  const ValidationReport repG = validate(badG, sample_grid(-10.0, 10.0, 2001), 1e-6);
  bool g_fail = false;
  for (const auto& it : repG.items)
    if (it.check == "0 <= G" && !it.pass) g_fail = true;
  CHECK(g_fail);
}

TEST_CASE("alpha alpha' difference quotients respect the declared bound") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(-10.0, 10.0);
  for (const std::string& name : material_catalog()) {
    const MaterialModel m = material_by_name(name);
    for (int k = 0; k < 500; ++k) {
      const double a = uni(rng), b = uni(rng);
      if (a == b) continue;
      const double q =
          std::abs(m.alpha(a) * m.alpha_prime(a) - m.alpha(b) * m.alpha_prime(b)) / std::abs(a - b);
      CHECK(q <= m.alpha_alpha_prime_lip + 1e-9);
    }
  }
}

TEST_CASE("unknown material lists the catalog") {
  try {
    material_by_name("nope");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("default") != std::string::npos);
    CHECK(std::string(e.what()).find("catalog") != std::string::npos);
  }
}

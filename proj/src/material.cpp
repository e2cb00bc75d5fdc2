#include "kwc/material.hpp"

#include <cmath>

namespace kwc {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_bound(ValidationReport& rep, const std::string& name, double worst, double tol) {
  rep.items.push_back({name, worst <= tol, worst});
}

}  // namespace

ValidationReport validate(const MaterialModel& m, const Vec& grid, double tol) {
  if (grid.empty()) throw ConfigError("validate: empty sample grid");
  ValidationReport rep;
  const double fd = 1e-5;

  double worst_alpha_pos = 0.0, worst_conv = 0.0, worst_G = 0.0;
  double worst_ap_bound = 0.0, worst_gp_bound = 0.0, worst_aap = 0.0;
  double worst_gG = 0.0, worst_a_fd = 0.0, worst_g_fd = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = grid[i];
    worst_alpha_pos = std::max(worst_alpha_pos, m.delta_star - m.alpha(e));
    worst_conv = std::max(worst_conv, -m.alpha_double_prime(e));
    worst_G = std::max(worst_G, -m.G(e));
    worst_ap_bound = std::max(worst_ap_bound, std::abs(m.alpha_prime(e)) - m.alpha_prime_sup);
    worst_gp_bound = std::max(worst_gp_bound, std::abs(m.g_prime(e)) - m.g_prime_sup);
    // derivative consistency by central differences
    worst_a_fd = std::max(worst_a_fd,
                          std::abs((m.alpha(e + fd) - m.alpha(e - fd)) / (2 * fd) - m.alpha_prime(e)));
    worst_g_fd =
        std::max(worst_g_fd, std::abs((m.g(e + fd) - m.g(e - fd)) / (2 * fd) - m.g_prime(e)));
    worst_gG = std::max(worst_gG, std::abs((m.G(e + fd) - m.G(e - fd)) / (2 * fd) - m.g(e)));
    if (i + 1 < grid.size()) {
      const double e2 = grid[i + 1];
      if (e2 != e) {
        const double q = std::abs(m.alpha(e2) * m.alpha_prime(e2) - m.alpha(e) * m.alpha_prime(e)) /
                         std::abs(e2 - e);
        worst_aap = std::max(worst_aap, q - m.alpha_alpha_prime_lip);
      }
    }
  }
  check_bound(rep, "alpha >= delta_star", worst_alpha_pos, tol);
  check_bound(rep, "alpha'(0) = 0", std::abs(m.alpha_prime(0.0)), tol);
  check_bound(rep, "alpha'' >= 0", worst_conv, tol);
  check_bound(rep, "0 <= G", worst_G, tol);
  check_bound(rep, "alpha' in Linf", worst_ap_bound, tol);
  check_bound(rep, "g' in Linf", worst_gp_bound, tol);
  check_bound(rep, "(alpha alpha')' in Linf", worst_aap, tol);
  check_bound(rep, "alpha' = d alpha", worst_a_fd, std::max(tol, 1e-7));
  check_bound(rep, "g' = d g", worst_g_fd, std::max(tol, 1e-7));
  check_bound(rep, "G' = g", worst_gG, std::max(tol, 1e-7));

  // alpha0 positivity on a coarse (t, x) sample; t range [0, 2] covers the desk-scale runs
  double worst_a0 = 0.0, worst_a0_fd = 0.0;
  for (int it = 0; it <= 20; ++it)
    for (int ix = 0; ix <= 20; ++ix) {
      const double t = 0.1 * it, x = 0.05 * ix;
      worst_a0 = std::max(worst_a0, m.delta_star - m.alpha0(t, x));
      worst_a0_fd = std::max(worst_a0_fd, std::abs((m.alpha0(t + fd, x) - m.alpha0(t - fd, x)) / (2 * fd) -
                                                   m.alpha0_dt(t, x)));
    }
  check_bound(rep, "alpha0 >= delta_star", worst_a0, tol);
  check_bound(rep, "dt alpha0 consistent", worst_a0_fd, std::max(tol, 1e-7));
  return rep;
}

MaterialModel builtin_default() {
  MaterialModel m;
  m.name = "default";
  const double ds = 0.5;
  m.alpha = [ds](double e) { return ds + std::sqrt(1.0 + e * e); };
  m.alpha_prime = [](double e) { return e / std::sqrt(1.0 + e * e); };
  m.alpha_double_prime = [](double e) { return std::pow(1.0 + e * e, -1.5); };
  m.g = [](double e) { return std::sin(kPi * e); };
  m.g_prime = [](double e) { return kPi * std::cos(kPi * e); };
  m.G = [](double e) { return (1.0 - std::cos(kPi * e)) / kPi; };
  m.alpha0 = [](double, double) { return 1.0; };
  m.alpha0_dt = [](double, double) { return 0.0; };
  m.delta_star = ds;
  m.alpha_prime_sup = 1.0;
  m.alpha_double_prime_sup = 1.0;
  m.g_prime_sup = kPi;
  // (alpha alpha')' = alpha'^2 + alpha alpha''; on the working range |eta| <= 10
  m.alpha_range_sup = ds + std::sqrt(101.0);
  m.alpha_alpha_prime_lip = 1.0 + m.alpha_range_sup;
  m.alpha0_W1inf = 1.0;
  m.alpha0_dt_sup = 0.0;
  return m;
}

MaterialModel builtin_mild() {
  MaterialModel m;
  m.name = "mild";
  const double ds = 0.5, c = 0.25, gamp = 0.5;
  m.alpha = [ds, c](double e) { return ds + std::sqrt(1.0 + c * e * e); };
  m.alpha_prime = [c](double e) { return c * e / std::sqrt(1.0 + c * e * e); };
  m.alpha_double_prime = [c](double e) { return c * std::pow(1.0 + c * e * e, -1.5); };
  m.g = [gamp](double e) { return gamp * std::sin(kPi * e); };
  m.g_prime = [gamp](double e) { return gamp * kPi * std::cos(kPi * e); };
  m.G = [gamp](double e) { return gamp * (1.0 - std::cos(kPi * e)) / kPi; };
  m.alpha0 = [](double, double) { return 1.0; };
  m.alpha0_dt = [](double, double) { return 0.0; };
  m.delta_star = ds;
  m.alpha_prime_sup = std::sqrt(c);
  m.alpha_double_prime_sup = c;
  m.g_prime_sup = gamp * kPi;
  m.alpha_range_sup = ds + std::sqrt(1.0 + c * 100.0);
  m.alpha_alpha_prime_lip = c + c * m.alpha_range_sup;
  m.alpha0_W1inf = 1.0;
  m.alpha0_dt_sup = 0.0;
  return m;
}

MaterialModel builtin_constant_alpha(double alpha_value) {
  if (!(alpha_value > 0.0)) throw ConfigError("constant_alpha: alpha_value must be positive");
  MaterialModel m;
  m.name = "constant_alpha";
  m.alpha = [alpha_value](double) { return alpha_value; };
  m.alpha_prime = [](double) { return 0.0; };
  m.alpha_double_prime = [](double) { return 0.0; };
  m.g = [](double) { return 0.0; };
  m.g_prime = [](double) { return 0.0; };
  m.G = [](double) { return 0.0; };
  m.alpha0 = [](double, double) { return 1.0; };
  m.alpha0_dt = [](double, double) { return 0.0; };
  m.delta_star = std::min(0.5, alpha_value);
  m.alpha_prime_sup = 0.0;
  m.alpha_double_prime_sup = 0.0;
  m.g_prime_sup = 0.0;
  m.alpha_alpha_prime_lip = 0.0;
  m.alpha0_W1inf = 1.0;
  m.alpha0_dt_sup = 0.0;
  m.alpha_range_sup = alpha_value;
  return m;
}

MaterialModel builtin_varying_alpha0() {
  MaterialModel m = builtin_default();
  m.name = "varying_alpha0";
  m.alpha0 = [](double t, double x) { return 1.0 + 0.1 * t * x; };
  m.alpha0_dt = [](double, double x) { return 0.1 * x; };
  // on Q with the desk-scale horizon t <= 2: |alpha0| <= 1.2, |dt| <= 0.1, |dx| <= 0.2
  m.alpha0_W1inf = 1.2;
  m.alpha0_dt_sup = 0.1;
  return m;
}

std::vector<std::string> material_catalog() {
  return {"default", "mild", "constant_alpha", "varying_alpha0"};
}

MaterialModel material_by_name(const std::string& name, const std::map<std::string, double>& params) {
  auto param = [&params](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "default") return builtin_default();
  if (name == "mild") return builtin_mild();
  if (name == "constant_alpha") return builtin_constant_alpha(param("alpha_value", 1.5));
  if (name == "varying_alpha0") return builtin_varying_alpha0();
  std::string cat;
  for (const auto& c : material_catalog()) cat += (cat.empty() ? "" : ", ") + c;
  throw ConfigError("unknown material '" + name + "', catalog: " + cat);
}

}  // namespace kwc

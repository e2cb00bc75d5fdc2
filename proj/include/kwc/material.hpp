#pragma once

// Model functions alpha, alpha0, g, G with their declared bounds, assumption
// validation, and the built-in catalog. Models are closures plus declared
// constants; the validator spot-checks the declarations on a sample grid.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kwc/fields.hpp"

namespace kwc {

struct MaterialModel {
  std::string name;

  std::function<double(double)> alpha, alpha_prime, alpha_double_prime;
  std::function<double(double)> g, g_prime, G;
  std::function<double(double, double)> alpha0;     // (t, x)
  std::function<double(double, double)> alpha0_dt;  // analytic d/dt alpha0

  double delta_star = 0.0;  // in (0,1): alpha >= delta_star and alpha0 >= delta_star

  // declared L-infinity style bounds, consumed by the estimate constants
  double alpha_prime_sup = 0.0;         // |alpha'|_inf
  double alpha_double_prime_sup = 0.0;  // |alpha''|_inf on the working range
  double g_prime_sup = 0.0;             // |g'|_inf
  double alpha_alpha_prime_lip = 0.0;   // |(alpha alpha')'|_inf
  double alpha0_W1inf = 0.0;            // max(|alpha0|, |dt alpha0|, |dx alpha0|) on Q
  double alpha0_dt_sup = 0.0;           // |dt alpha0|_inf (the adjoint b-coefficient bound)
  double alpha_range_sup = 0.0;         // sup of alpha on the sampled working range
};

struct ValidationItem {
  std::string check;
  bool pass = false;
  double worst = 0.0;  // worst violation (<= tol means pass) or worst FD mismatch
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool all_pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return true;
  }
};

// Checks (A1)-(A3) style conditions on the sample grid: positivity above
// delta_star, alpha'(0) = 0, alpha'' >= 0, G >= 0, derivative consistency by
// central differences, and the declared Lipschitz/sup bounds.
ValidationReport validate(const MaterialModel& model, const Vec& sample_grid, double tol);

// alpha(eta) = delta* + sqrt(1+eta^2), g(eta) = sin(pi eta), alpha0 = 1
MaterialModel builtin_default();
// softer nonlinearities, used by adjoint/gradient benchmarks
MaterialModel builtin_mild();
// constant alpha, zero g: the eta-channel is linear and decoupled
MaterialModel builtin_constant_alpha(double alpha_value = 1.5);
// default model with alpha0(t,x) = 1 + 0.1 t x so the adjoint b-term is active
MaterialModel builtin_varying_alpha0();

// name + parameter-map lookup; throws ConfigError listing the catalog
MaterialModel material_by_name(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> material_catalog();

}  // namespace kwc

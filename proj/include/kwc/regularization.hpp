#pragma once

// The regularized absolute value f_eps(xi) = sqrt(eps^2 + xi^2), its
// derivatives for eps > 0, and the set-valued sign Sgn^1 used at the singular
// limit. eps = 0 is a first-class value: smooth-only operations reject it
// instead of silently substituting a tiny epsilon.

#include <cmath>

#include "kwc/errors.hpp"

namespace kwc {

struct Epsilon {
  double value = 0.0;

  Epsilon() = default;
  explicit Epsilon(double v) : value(v) {
    if (!(std::isfinite(v)) || v < 0.0) throw ConfigError("Epsilon: value must be finite and >= 0");
  }

  bool is_zero() const { return value == 0.0; }
};

inline double f_eps(Epsilon eps, double xi) { return std::hypot(eps.value, xi); }

inline double f_eps_prime(Epsilon eps, double xi) {
  if (eps.is_zero())
    throw SingularLimitError("f_eps_prime: eps = 0 is set-valued, use sgn1 machinery");
  return xi / std::hypot(eps.value, xi);
}

// f_eps''(xi) = eps^2 / (eps^2 + xi^2)^(3/2)
inline double f_eps_double_prime(Epsilon eps, double xi) {
  if (eps.is_zero()) throw SingularLimitError("f_eps_double_prime: eps = 0 is singular");
  const double r = std::hypot(eps.value, xi);
  return (eps.value / r) * (eps.value / r) / r;
}

// closed interval, lo <= hi
struct SignInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return lo <= v && v <= hi; }
};

inline SignInterval sgn1(double xi) {
  if (xi > 0.0) return {1.0, 1.0};
  if (xi < 0.0) return {-1.0, -1.0};
  return {-1.0, 1.0};
}

// distance from nu to the set Sgn^1(xi); a certificate for the eps -> 0 limit
inline double sgn_residual(double nu, double xi) {
  if (xi == 0.0) return std::max(0.0, std::abs(nu) - 1.0);
  return std::abs(nu - (xi > 0.0 ? 1.0 : -1.0));
}

}  // namespace kwc

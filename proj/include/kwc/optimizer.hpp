#pragma once

// Adjoint-based gradient descent for the regularized control problems and
// epsilon-continuation toward the singular limit, with the limit certificates:
// nu in Sgn^1(dx theta), the xi coupling field, residuals of the limit adjoint
// equations, and the first-order optimality residual.

#include <functional>
#include <string>
#include <vector>

#include "kwc/adjoint.hpp"

namespace kwc {

enum class StepStrategy { fixed, armijo, barzilai_borwein };

struct OptimizerConfig {
  int max_iters = 100;
  double c1 = 1e-4;          // Armijo constant in (0,1)
  double backtrack = 0.5;    // step shrink factor
  double init_step = 1.0;
  double grad_tol = 1e-8;    // stop when the X x H gradient norm drops below
  StepStrategy strategy = StepStrategy::armijo;

  void check() const {
    if (!(c1 > 0.0 && c1 < 1.0)) throw ConfigError("optimizer: c1 must lie in (0,1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("optimizer: backtrack in (0,1)");
    if (!(grad_tol > 0.0) || !(init_step > 0.0)) throw ConfigError("optimizer: tolerances > 0");
  }
};

struct HistoryRow {
  int iter = 0;
  double eps = 0.0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double optimality_residual = 0.0;  // the (u+p, ... ) residual norm
};

struct OptResult {
  ControlTriple controls;
  StateTrajectory state;
  std::vector<HistoryRow> history;
  bool converged = false;
  bool line_search_failed = false;
};

OptResult solve_OP(const ProblemConfig& cfg, const StateTriple& init_state,
                   const ControlTriple& init_controls, const OptimizerConfig& opt);

struct ContinuationSchedule {
  std::vector<double> eps_levels;  // strictly decreasing, nonnegative
  OptimizerConfig opt;

  void check() const {
    if (eps_levels.empty()) throw ConfigError("continuation: empty schedule");
    for (std::size_t i = 0; i + 1 < eps_levels.size(); ++i)
      if (!(eps_levels[i] > eps_levels[i + 1]))
        throw ConfigError("continuation: eps levels must be strictly decreasing");
    if (eps_levels.back() < 0.0) throw ConfigError("continuation: eps levels must be >= 0");
  }
};

struct LimitCertificate {
  // cellwise space-time fields at the last smooth level, one row per time node
  std::vector<Vec> nu_field;   // f_eps'(dx theta)
  std::vector<Vec> xi_field;   // omega . dx z
  std::vector<Vec> sgn_field;  // distance to Sgn^1(dx theta_limit)
  double sgn_residual_max = 0.0;
  double nu_abs_max = 0.0;
  std::vector<double> p_eq_residual;   // limit p-equation residual norm per step
  std::vector<double> zeta_values;     // remainder functional on the test family
  double optimality_residual = 0.0;
  double eps_last_smooth = 0.0;
};

struct ContinuationResult {
  ControlTriple controls;
  StateTrajectory state;             // state at the final schedule level
  LimitCertificate certificate;
  std::vector<HistoryRow> history;   // concatenated over levels
  std::vector<std::string> level_notes;
};

ContinuationResult solve_OP0(const ProblemConfig& cfg, const StateTriple& init_state,
                             const ContinuationSchedule& schedule);

}  // namespace kwc

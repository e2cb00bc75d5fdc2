#pragma once

// Experiment configuration: a single JSON file names every input (built-in
// analytic fields or inline arrays), and `run` executes one mode and writes
// the manifest plus plot-ready CSVs into the output directory. Reruns with
// the same spec and seed produce byte-identical numeric output.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kwc/optimizer.hpp"
#include "kwc/problem.hpp"
#include "kwc/verify.hpp"

#include "json.hpp"

namespace kwc {

// analytic space-time field selected by name + parameters, or inline nodal values
struct FieldSpec {
  std::string name = "zero";
  std::map<std::string, double> params;
  Vec inline_values;  // time-independent nodal values; used when name == "inline"

  std::function<double(double, double)> make() const;  // (t, x)
  static std::vector<std::string> catalog();
};

struct LinearSection {
  FieldSpec a{"one", {}, {}};
  FieldSpec b, mu, omega, A;
  FieldSpec h, k;
  FieldSpec h_Gamma;  // evaluated at x in {0,1}
  FieldSpec p0, z0;
};

struct ExperimentSpec {
  std::string mode = "state";
  int cells = 64;
  double T = 0.5;
  double tau = 0.0;  // 0 means: materialize from the tau0/2 rule
  double nu = 1.0;
  double epsilon = 0.1;
  std::string mass = "lumped";
  Weights weights;
  std::string material_name = "default";
  std::map<std::string, double> material_params;

  FieldSpec initial_eta, initial_theta;
  FieldSpec control_u, control_u_Gamma, control_v;

  std::string target_kind = "fields";  // fields | inverse_crime
  FieldSpec target_eta, target_eta_Gamma, target_theta;
  FieldSpec crime_u, crime_u_Gamma, crime_v;  // generating controls of the inverse crime

  OptimizerConfig optimizer;
  std::string step_strategy = "armijo";
  std::vector<double> continuation_eps = {0.5, 0.25, 0.1, 0.05};

  int verify_mosco_samples = 100000;
  int verify_gronwall_instances = 1000;
  int verify_apriori_problems = 20;

  LinearSection linear;

  std::string output_dir = "out";
  std::uint64_t seed = 1;

  nlohmann::json echo() const;  // fully resolved spec, reparseable
};

ExperimentSpec parse_config(const std::string& path);
ExperimentSpec parse_config_json(const nlohmann::json& j);

// materialized problem pieces
ProblemConfig build_problem(const ExperimentSpec& spec);
StateTriple build_initial_state(const ExperimentSpec& spec, const ProblemConfig& cfg);
ControlTriple build_controls(const ExperimentSpec& spec, const ProblemConfig& cfg);

// executes the mode; returns the process exit code (0 ok, 1 solver failure, 2 config error)
int run(const ExperimentSpec& spec);

}  // namespace kwc

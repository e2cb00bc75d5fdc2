#include "kwc/config.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "kwc/csvio.hpp"

namespace kwc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double get_param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace

std::vector<std::string> FieldSpec::catalog() {
  return {"zero", "one", "constant", "sine", "cosine", "plateau", "gaussian", "ramp_t", "inline"};
}

std::function<double(double, double)> FieldSpec::make() const {
  const auto& p = params;
  if (name == "zero") return [](double, double) { return 0.0; };
  if (name == "one") return [](double, double) { return 1.0; };
  if (name == "constant") {
    const double v = get_param(p, "value", 1.0);
    return [v](double, double) { return v; };
  }
  if (name == "sine") {
    const double a = get_param(p, "amplitude", 1.0);
    const double m = get_param(p, "mode", 1.0);
    const double d = get_param(p, "decay", 0.0);
    return [a, m, d](double t, double x) { return a * std::exp(-d * t) * std::sin(m * kPi * x); };
  }
  if (name == "cosine") {
    const double a = get_param(p, "amplitude", 1.0);
    const double m = get_param(p, "mode", 1.0);
    const double d = get_param(p, "decay", 0.0);
    return [a, m, d](double t, double x) { return a * std::exp(-d * t) * std::cos(m * kPi * x); };
  }
  if (name == "plateau") {
    // trapezoid vanishing at both endpoints, flat on the middle half
    const double a = get_param(p, "amplitude", 1.0);
    return [a](double, double x) { return a * std::min({4.0 * x, 1.0, 4.0 * (1.0 - x)}); };
  }
  if (name == "gaussian") {
    const double a = get_param(p, "amplitude", 1.0);
    const double c = get_param(p, "center", 0.5);
    const double w = get_param(p, "width", 0.1);
    return [a, c, w](double, double x) {
      const double s = (x - c) / w;
      return a * std::exp(-0.5 * s * s);
    };
  }
  if (name == "ramp_t") {
    const double a = get_param(p, "amplitude", 1.0);
    return [a](double t, double) { return a * t; };
  }
  if (name == "inline") {
    const Vec vals = inline_values;
    return [vals](double, double x) {
      if (vals.empty()) return 0.0;
      if (vals.size() == 1) return vals[0];
      const double pos = x * static_cast<double>(vals.size() - 1);
      const auto lo = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0,
                                                          static_cast<double>(vals.size() - 2)));
      const double s = pos - static_cast<double>(lo);
      return (1.0 - s) * vals[lo] + s * vals[lo + 1];
    };
  }
  std::string cat;
  for (const auto& c : catalog()) cat += (cat.empty() ? "" : ", ") + c;
  throw ConfigError("unknown field '" + name + "', catalog: " + cat);
}

namespace {

using nlohmann::json;

FieldSpec field_from_json(const json& j, const std::string& where, std::vector<std::string>& errs) {
  FieldSpec f;
  if (j.is_null()) return f;
  if (!j.is_object()) {
    errs.push_back(where + ": field spec must be an object");
    return f;
  }
  if (j.contains("values")) {
    f.name = "inline";
    for (const auto& v : j.at("values")) f.inline_values.push_back(v.get<double>());
    return f;
  }
  f.name = j.value("name", "zero");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "name" && it->is_number()) f.params[it.key()] = it->get<double>();
  try {
    f.make();
  } catch (const ConfigError& e) {
    errs.push_back(where + ": " + e.what());
  }
  return f;
}

json field_to_json(const FieldSpec& f) {
  json j;
  if (f.name == "inline") {
    j["values"] = f.inline_values;
    return j;
  }
  j["name"] = f.name;
  for (const auto& [k, v] : f.params) j[k] = v;
  return j;
}

}  // namespace

ExperimentSpec parse_config_json(const nlohmann::json& j) {
  std::vector<std::string> errs;
  ExperimentSpec s;

  s.mode = j.value("mode", "state");
  const std::vector<std::string> modes = {"state", "linear", "adjoint", "optimize", "continuation",
                                          "verify"};
  if (std::find(modes.begin(), modes.end(), s.mode) == modes.end())
    errs.push_back("mode '" + s.mode + "' unknown (state|linear|adjoint|optimize|continuation|verify)");

  s.cells = j.value("cells", 64);
  if (s.cells < 2) errs.push_back("cells must be >= 2");
  if (j.contains("time")) {
    s.T = j.at("time").value("T", 0.5);
    s.tau = j.at("time").value("tau", 0.0);
  }
  if (!(s.T > 0.0)) errs.push_back("time.T must be positive");
  if (s.tau < 0.0 || s.tau >= 1.0) errs.push_back("time.tau must lie in (0,1) when given");
  s.nu = j.value("nu", 1.0);
  if (!(s.nu > 0.0)) errs.push_back("nu must be positive");
  s.epsilon = j.value("epsilon", 0.1);
  if (s.epsilon < 0.0) errs.push_back("epsilon must be >= 0");
  s.mass = j.value("mass", "lumped");
  if (s.mass != "lumped" && s.mass != "consistent") errs.push_back("mass: lumped|consistent");

  if (j.contains("weights")) {
    const json& w = j.at("weights");
    s.weights.K = w.value("K", 0.0);
    s.weights.K_Gamma = w.value("K_Gamma", 0.0);
    s.weights.Lambda = w.value("Lambda", 0.0);
    s.weights.L = w.value("L", 0.0);
    s.weights.L_Gamma = w.value("L_Gamma", 0.0);
    s.weights.M = w.value("M", 0.0);
    const double vals[] = {s.weights.K, s.weights.K_Gamma, s.weights.Lambda,
                           s.weights.L, s.weights.L_Gamma, s.weights.M};
    for (double v : vals)
      if (v < 0.0) {
        errs.push_back("weights: the cost functional requires nonnegative coefficients");
        break;
      }
  }

  if (j.contains("material")) {
    s.material_name = j.at("material").value("name", "default");
    if (j.at("material").contains("params"))
      for (auto it = j.at("material").at("params").begin(); it != j.at("material").at("params").end();
           ++it)
        s.material_params[it.key()] = it->get<double>();
  }
  try {
    material_by_name(s.material_name, s.material_params);
  } catch (const ConfigError& e) {
    errs.push_back(e.what());
  }

  if (j.contains("initial")) {
    s.initial_eta = field_from_json(j.at("initial").value("eta", json()), "initial.eta", errs);
    s.initial_theta = field_from_json(j.at("initial").value("theta", json()), "initial.theta", errs);
  }
  // theta lives in V0: its initial profile must vanish on the boundary
  try {
    auto th = s.initial_theta.make();
    if (std::abs(th(0.0, 0.0)) > 1e-12 || std::abs(th(0.0, 1.0)) > 1e-12)
      errs.push_back("initial.theta must vanish at x = 0 and x = 1");
  } catch (const ConfigError&) {
  }

  if (j.contains("controls")) {
    s.control_u = field_from_json(j.at("controls").value("u", json()), "controls.u", errs);
    s.control_u_Gamma =
        field_from_json(j.at("controls").value("u_Gamma", json()), "controls.u_Gamma", errs);
    s.control_v = field_from_json(j.at("controls").value("v", json()), "controls.v", errs);
  }

  if (j.contains("targets")) {
    const json& t = j.at("targets");
    s.target_kind = t.value("kind", "fields");
    if (s.target_kind == "fields") {
      s.target_eta = field_from_json(t.value("eta_ad", json()), "targets.eta_ad", errs);
      s.target_eta_Gamma =
          field_from_json(t.value("eta_Gamma_ad", json()), "targets.eta_Gamma_ad", errs);
      s.target_theta = field_from_json(t.value("theta_ad", json()), "targets.theta_ad", errs);
    } else if (s.target_kind == "inverse_crime") {
      if (t.contains("controls")) {
        s.crime_u = field_from_json(t.at("controls").value("u", json()), "targets.controls.u", errs);
        s.crime_u_Gamma = field_from_json(t.at("controls").value("u_Gamma", json()),
                                          "targets.controls.u_Gamma", errs);
        s.crime_v = field_from_json(t.at("controls").value("v", json()), "targets.controls.v", errs);
      }
    } else {
      errs.push_back("targets.kind: fields|inverse_crime");
    }
  }

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    s.optimizer.max_iters = o.value("max_iters", 100);
    s.optimizer.c1 = o.value("c1", 1e-4);
    s.optimizer.backtrack = o.value("backtrack", 0.5);
    s.optimizer.init_step = o.value("init_step", 1.0);
    s.optimizer.grad_tol = o.value("grad_tol", 1e-8);
    s.step_strategy = o.value("strategy", "armijo");
  }
  if (s.step_strategy == "fixed")
    s.optimizer.strategy = StepStrategy::fixed;
  else if (s.step_strategy == "armijo")
    s.optimizer.strategy = StepStrategy::armijo;
  else if (s.step_strategy == "bb" || s.step_strategy == "barzilai-borwein")
    s.optimizer.strategy = StepStrategy::barzilai_borwein;
  else
    errs.push_back("optimizer.strategy: fixed|armijo|bb");
  try {
    s.optimizer.check();
  } catch (const ConfigError& e) {
    errs.push_back(e.what());
  }

  if (j.contains("continuation")) {
    s.continuation_eps.clear();
    for (const auto& v : j.at("continuation").value("epsilons", json::array()))
      s.continuation_eps.push_back(v.get<double>());
    for (std::size_t i = 0; i + 1 < s.continuation_eps.size(); ++i)
      if (!(s.continuation_eps[i] > s.continuation_eps[i + 1])) {
        errs.push_back("continuation.epsilons must be strictly decreasing");
        break;
      }
  }

  if (j.contains("verify")) {
    s.verify_mosco_samples = j.at("verify").value("mosco_samples", 100000);
    s.verify_gronwall_instances = j.at("verify").value("gronwall_instances", 1000);
    s.verify_apriori_problems = j.at("verify").value("apriori_problems", 20);
  }

  if (j.contains("linear")) {
    const json& l = j.at("linear");
    s.linear.a = field_from_json(l.value("a", json{{"name", "one"}}), "linear.a", errs);
    s.linear.b = field_from_json(l.value("b", json()), "linear.b", errs);
    s.linear.mu = field_from_json(l.value("mu", json()), "linear.mu", errs);
    s.linear.omega = field_from_json(l.value("omega", json()), "linear.omega", errs);
    s.linear.A = field_from_json(l.value("A", json()), "linear.A", errs);
    s.linear.h = field_from_json(l.value("h", json()), "linear.h", errs);
    s.linear.h_Gamma = field_from_json(l.value("h_Gamma", json()), "linear.h_Gamma", errs);
    s.linear.k = field_from_json(l.value("k", json()), "linear.k", errs);
    s.linear.p0 = field_from_json(l.value("p0", json()), "linear.p0", errs);
    s.linear.z0 = field_from_json(l.value("z0", json()), "linear.z0", errs);
  }

  s.output_dir = j.value("output", "out");
  s.seed = j.value("seed", static_cast<std::uint64_t>(1));

  if (!errs.empty()) throw ConfigError(errs);
  return s;
}

ExperimentSpec parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error in " + path + ": " + e.what());
  }
  return parse_config_json(j);
}

ProblemConfig build_problem(const ExperimentSpec& spec) {
  ProblemConfig cfg;
  cfg.mesh = Mesh1D(spec.cells);
  cfg.nu = spec.nu;
  cfg.eps = Epsilon(spec.epsilon);
  cfg.weights = spec.weights;
  cfg.material = material_by_name(spec.material_name, spec.material_params);
  cfg.mass = spec.mass == "lumped" ? MassKind::lumped : MassKind::consistent;

  double tau = spec.tau;
  if (tau <= 0.0) {
    // tau0/2 rule with frozen initial coefficients (smoothed eps for the bound)
    StateTriple init = build_initial_state(spec, cfg);
    StateTrajectory frozen;
    frozen.states = {init, init};
    frozen.steps = 1;
    ProblemConfig probe = cfg;
    probe.time = TimeGrid::with_steps(spec.T, 1);
    const Epsilon eps_eff(std::max(spec.epsilon, 0.05));
    const CoefficientQuintet q = coeffs_from_state(frozen, eps_eff, probe);
    tau = 0.5 * tau0(q, spec.nu);
  }
  cfg.time = TimeGrid::with_tau(spec.T, tau);

  // targets materialized on the grid
  cfg.targets = TargetTriple::zero(cfg.mesh, cfg.time);
  if (spec.target_kind == "fields") {
    auto fe = spec.target_eta.make();
    auto fg = spec.target_eta_Gamma.make();
    auto ft = spec.target_theta.make();
    for (int i = 0; i < cfg.time.n_nodes(); ++i) {
      const double t = cfg.time.t(i);
      for (int jn = 0; jn < cfg.mesh.n_nodes(); ++jn) {
        cfg.targets.eta_ad[i][jn] = fe(t, cfg.mesh.node(jn));
        cfg.targets.theta_ad[i][jn] = ft(t, cfg.mesh.node(jn));
      }
      cfg.targets.eta_Gamma_ad[i] = BoundaryPair{fg(t, 0.0), fg(t, 1.0)};
    }
  }
  return cfg;
}

StateTriple build_initial_state(const ExperimentSpec& spec, const ProblemConfig& cfg) {
  auto fe = spec.initial_eta.make();
  auto ft = spec.initial_theta.make();
  Vec eta(cfg.mesh.n_nodes());
  for (int j = 0; j < cfg.mesh.n_nodes(); ++j) eta[j] = fe(0.0, cfg.mesh.node(j));
  Vec th(cfg.mesh.n_interior());
  for (int j = 0; j < cfg.mesh.n_interior(); ++j) th[j] = ft(0.0, cfg.mesh.node(j + 1));
  return StateTriple{BulkBoundaryFn::from_bulk(cfg.mesh, eta), GridFn0(cfg.mesh, th)};
}

ControlTriple build_controls(const ExperimentSpec& spec, const ProblemConfig& cfg) {
  auto fu = spec.control_u.make();
  auto fg = spec.control_u_Gamma.make();
  auto fv = spec.control_v.make();
  ControlTriple c = ControlTriple::zero(cfg.mesh, cfg.time);
  for (int i = 0; i < cfg.time.n_nodes(); ++i) {
    const double t = cfg.time.t(i);
    for (int j = 0; j < cfg.mesh.n_nodes(); ++j) {
      c.u[i][j] = fu(t, cfg.mesh.node(j));
      c.v[i][j] = fv(t, cfg.mesh.node(j));
    }
    c.u_Gamma[i] = BoundaryPair{fg(t, 0.0), fg(t, 1.0)};
  }
  return c;
}

nlohmann::json ExperimentSpec::echo() const {
  json j;
  j["mode"] = mode;
  j["cells"] = cells;
  j["time"] = {{"T", T}, {"tau", tau}};
  j["nu"] = nu;
  j["epsilon"] = epsilon;
  j["mass"] = mass;
  j["weights"] = {{"K", weights.K},         {"K_Gamma", weights.K_Gamma}, {"Lambda", weights.Lambda},
                  {"L", weights.L},         {"L_Gamma", weights.L_Gamma}, {"M", weights.M}};
  j["material"] = {{"name", material_name}, {"params", material_params}};
  j["initial"] = {{"eta", field_to_json(initial_eta)}, {"theta", field_to_json(initial_theta)}};
  j["controls"] = {{"u", field_to_json(control_u)},
                   {"u_Gamma", field_to_json(control_u_Gamma)},
                   {"v", field_to_json(control_v)}};
  if (target_kind == "fields")
    j["targets"] = {{"kind", target_kind},
                    {"eta_ad", field_to_json(target_eta)},
                    {"eta_Gamma_ad", field_to_json(target_eta_Gamma)},
                    {"theta_ad", field_to_json(target_theta)}};
  else
    j["targets"] = {{"kind", target_kind},
                    {"controls",
                     {{"u", field_to_json(crime_u)},
                      {"u_Gamma", field_to_json(crime_u_Gamma)},
                      {"v", field_to_json(crime_v)}}}};
  j["optimizer"] = {{"max_iters", optimizer.max_iters}, {"c1", optimizer.c1},
                    {"backtrack", optimizer.backtrack}, {"init_step", optimizer.init_step},
                    {"grad_tol", optimizer.grad_tol},   {"strategy", step_strategy}};
  j["continuation"] = {{"epsilons", continuation_eps}};
  j["verify"] = {{"mosco_samples", verify_mosco_samples},
                 {"gronwall_instances", verify_gronwall_instances},
                 {"apriori_problems", verify_apriori_problems}};
  j["linear"] = {{"a", field_to_json(linear.a)},       {"b", field_to_json(linear.b)},
                 {"mu", field_to_json(linear.mu)},     {"omega", field_to_json(linear.omega)},
                 {"A", field_to_json(linear.A)},       {"h", field_to_json(linear.h)},
                 {"h_Gamma", field_to_json(linear.h_Gamma)}, {"k", field_to_json(linear.k)},
                 {"p0", field_to_json(linear.p0)},     {"z0", field_to_json(linear.z0)}};
  j["output"] = output_dir;
  j["seed"] = seed;
  return j;
}

namespace {

ControlTriple controls_from_fields(const FieldSpec& u, const FieldSpec& uG, const FieldSpec& v,
                                   const ProblemConfig& cfg) {
  auto fu = u.make();
  auto fg = uG.make();
  auto fv = v.make();
  ControlTriple c = ControlTriple::zero(cfg.mesh, cfg.time);
  for (int i = 0; i < cfg.time.n_nodes(); ++i) {
    const double t = cfg.time.t(i);
    for (int j = 0; j < cfg.mesh.n_nodes(); ++j) {
      c.u[i][j] = fu(t, cfg.mesh.node(j));
      c.v[i][j] = fv(t, cfg.mesh.node(j));
    }
    c.u_Gamma[i] = BoundaryPair{fg(t, 0.0), fg(t, 1.0)};
  }
  return c;
}

// materialize inverse-crime targets: run the state with the generating controls
void materialize_targets(const ExperimentSpec& spec, ProblemConfig& cfg,
                         const StateTriple& init) {
  if (spec.target_kind != "inverse_crime") return;
  const ControlTriple gen = controls_from_fields(spec.crime_u, spec.crime_u_Gamma, spec.crime_v, cfg);
  const StateTrajectory traj = solve_state(init, gen, cfg);
  for (int i = 0; i < cfg.time.n_nodes(); ++i) {
    cfg.targets.eta_ad[i] = traj.states[i].eta.bulk;
    cfg.targets.eta_Gamma_ad[i] = traj.states[i].eta.boundary;
    cfg.targets.theta_ad[i] = traj.states[i].theta.full();
  }
}

void write_manifest(const ExperimentSpec& spec, const ProblemConfig& cfg, double seconds) {
  ExperimentSpec resolved = spec;
  resolved.tau = cfg.time.tau;  // materialized value
  json m;
  m["spec"] = resolved.echo();
  m["resolved"] = {{"steps", cfg.time.steps}, {"t_end", cfg.time.t_end()},
                   {"R0", default_R0(cfg.material, cfg.nu)}};
  m["version"] = "0.1.0";
  m["timing_seconds"] = seconds;
  std::ofstream out(std::filesystem::path(spec.output_dir) / "manifest.json");
  out << m.dump(2) << "\n";
}

int run_verify(const ExperimentSpec& spec) {
  std::vector<ReportRow> rows;
  std::mt19937_64 rng(spec.seed);

  {
    const double worst = mosco_random_sweep(spec.verify_mosco_samples, rng);
    rows.push_back({"mosco_uniform_bound", worst <= 1e-14, 1e-14 - worst, 1e-14});
  }
  {
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < spec.verify_gronwall_instances; ++k) {
      const GronwallInstance inst = gronwall_equality_instance(rng);
      const double bound = discrete_gronwall_bound(inst);
      for (int i = 1; i <= inst.N; ++i) {
        const double excess = inst.P[i] - bound * (1.0 + 1e-12);
        worst = std::max(worst, excess);
        if (excess > 0.0) ok = false;
      }
    }
    rows.push_back({"discrete_gronwall", ok, -worst, 1e-12});
  }
  {
    bool ok = true;
    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < spec.verify_apriori_problems; ++k) {
      const Mesh1D mesh(32);
      TimeGrid probe = TimeGrid::with_steps(1.0, 64);
      CoefficientQuintet q = random_smooth_quintet(rng, mesh, probe, MassKind::lumped);
      const double t0v = tau0(q, spec.nu);
      const TimeGrid tg = TimeGrid::with_tau(64 * t0v / 2.0, t0v / 2.0);
      q = random_smooth_quintet(rng, mesh, tg, MassKind::lumped);
      const ForcingTriple f = random_smooth_forcing(rng, mesh, tg);
      const LinearTriple init = random_smooth_init(rng, mesh);
      const LinearTrajectory traj = solve_P(init, q, f, mesh, tg, spec.nu, MassKind::lumped);
      const EstimateConstants ec = constants(q, spec.nu, tg.t_end());
      const AprioriReport rep = check_apriori(traj, init, q, ec, mesh, tg, spec.nu, MassKind::lumped);
      ok = ok && rep.step_energy_ok && rep.step_increment_ok && rep.integrated_ok && rep.dt_bounds_ok;
      margin = std::min({margin, rep.step_energy_margin, rep.step_increment_margin, rep.integrated_margin});
    }
    rows.push_back({"scheme_apriori_bounds", ok, margin, 0.0});
  }
  {
    const ConvergenceStudy t =
        study_linear_temporal({1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256}, 32, 0.5);
    rows.push_back({"linear_temporal_order", std::abs(t.order - 1.0) <= 0.15, t.order, 0.15});
    const ConvergenceStudy h = study_linear_spatial({8, 16, 32}, 0.05);
    rows.push_back({"linear_spatial_order", std::abs(h.order - 2.0) <= 0.25, h.order, 0.25});
    const ConvergenceStudy e = study_state_spatial({8, 16, 32}, 0.05);
    rows.push_back({"state_spatial_order", std::abs(e.order - 2.0) <= 0.25, e.order, 0.25});
  }
  {
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (double ev : {0.0, 0.1, 1.0}) {
      ProblemConfig cfg;
      cfg.mesh = Mesh1D(32);
      cfg.time = TimeGrid::with_steps(0.25, 32);
      cfg.eps = Epsilon(ev);
      cfg.material = builtin_default();
      cfg.targets = TargetTriple::zero(cfg.mesh, cfg.time);
      Vec eta0(cfg.mesh.n_nodes());
      for (int j = 0; j < cfg.mesh.n_nodes(); ++j)
        eta0[j] = 0.5 + 0.1 * std::cos(kPi * cfg.mesh.node(j));
      Vec th0(cfg.mesh.n_interior());
      for (int j = 0; j < cfg.mesh.n_interior(); ++j)
        th0[j] = 0.2 * std::sin(kPi * cfg.mesh.node(j + 1));
      StateTriple init{BulkBoundaryFn::from_bulk(cfg.mesh, eta0), GridFn0(cfg.mesh, th0)};
      const StateTrajectory traj = solve_state(init, ControlTriple::zero(cfg.mesh, cfg.time), cfg);
      const DissipationReport rep = check_energy_dissipation(traj, cfg);
      ok = ok && rep.pass;
      worst = std::min(worst, rep.worst_margin);
    }
    rows.push_back({"energy_dissipation", ok, worst, 0.0});
  }
  {
    const Mesh1D mesh(24);
    const TimeGrid tg = TimeGrid::with_steps(0.4, 64);
    const CoefficientQuintet q = random_smooth_quintet(rng, mesh, tg, MassKind::lumped);
    const LinearTriple i1 = random_smooth_init(rng, mesh);
    const LinearTriple i2 = random_smooth_init(rng, mesh);
    const ForcingTriple f1 = random_smooth_forcing(rng, mesh, tg);
    const ForcingTriple f2 = random_smooth_forcing(rng, mesh, tg);
    const DependenceReport rep =
        check_continuous_dependence(i1, f1, i2, f2, q, mesh, tg, spec.nu, MassKind::lumped);
    rows.push_back({"continuous_dependence", rep.pass, rep.rhs - rep.lhs, 0.0});
  }

  write_report_csv((std::filesystem::path(spec.output_dir) / "report.csv").string(), rows);
  for (const ReportRow& r : rows)
    if (!r.pass) return 1;
  return 0;
}

}  // namespace

int run(const ExperimentSpec& spec) {
  namespace fs = std::filesystem;
  const auto start = std::chrono::steady_clock::now();
  try {
    fs::create_directories(spec.output_dir);

    if (spec.mode == "verify") {
      ProblemConfig cfg = build_problem(spec);
      const int rc = run_verify(spec);
      write_manifest(spec, cfg,
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      return rc;
    }

    ProblemConfig cfg = build_problem(spec);
    const fs::path outdir(spec.output_dir);

    if (spec.mode == "linear") {
      auto fa = spec.linear.a.make();
      auto fb = spec.linear.b.make();
      auto fmu = spec.linear.mu.make();
      auto fom = spec.linear.omega.make();
      auto fA = spec.linear.A.make();
      CoefficientQuintet q;
      const int nn = cfg.time.n_nodes();
      q.a.assign(nn, Vec(cfg.mesh.n_nodes()));
      q.b.assign(nn, Vec(cfg.mesh.n_nodes()));
      q.mu.assign(nn, Vec(cfg.mesh.n_nodes()));
      q.omega.assign(nn, Vec(cfg.mesh.n_cells));
      q.A.assign(nn, Vec(cfg.mesh.n_cells));
      for (int i = 0; i < nn; ++i) {
        const double t = cfg.time.t(i);
        for (int j = 0; j < cfg.mesh.n_nodes(); ++j) {
          q.a[i][j] = fa(t, cfg.mesh.node(j));
          q.b[i][j] = fb(t, cfg.mesh.node(j));
          q.mu[i][j] = fmu(t, cfg.mesh.node(j));
        }
        for (int c = 0; c < cfg.mesh.n_cells; ++c) {
          q.omega[i][c] = fom(t, cfg.mesh.mid(c));
          q.A[i][c] = fA(t, cfg.mesh.mid(c));
        }
      }
      // sampled W^{1,inf} estimate of a for the diagnostic constants
      double a_sup = 0.0, da_sup = 0.0;
      const double fd = 1e-5;
      for (int i = 0; i < nn; ++i) {
        const double t = cfg.time.t(i);
        for (int j = 0; j < cfg.mesh.n_nodes(); ++j) {
          const double x = cfg.mesh.node(j);
          a_sup = std::max(a_sup, std::abs(fa(t, x)));
          da_sup = std::max(da_sup, std::abs((fa(t, x + fd) - fa(t, x - fd)) / (2 * fd)));
          da_sup = std::max(da_sup, std::abs((fa(t + fd, x) - fa(t - fd, x)) / (2 * fd)));
        }
      }
      q.a_W1inf = std::max(a_sup, da_sup);
      q.measure(cfg.mesh, cfg.mass);

      auto fh = spec.linear.h.make();
      auto fhg = spec.linear.h_Gamma.make();
      auto fk = spec.linear.k.make();
      ForcingTriple f = ForcingTriple::zero(cfg.mesh, nn);
      for (int i = 0; i < nn; ++i) {
        const double t = cfg.time.t(i);
        for (int j = 0; j < cfg.mesh.n_nodes(); ++j) f.h[i][j] = fh(t, cfg.mesh.node(j));
        f.h_Gamma[i] = BoundaryPair{fhg(t, 0.0), fhg(t, 1.0)};
        Vec k(cfg.mesh.n_interior());
        for (int j = 0; j < cfg.mesh.n_interior(); ++j) k[j] = fk(t, cfg.mesh.node(j + 1));
        f.k[i] = GridFn0(cfg.mesh, k);
      }
      auto fp0 = spec.linear.p0.make();
      auto fz0 = spec.linear.z0.make();
      Vec p0(cfg.mesh.n_nodes());
      for (int j = 0; j < cfg.mesh.n_nodes(); ++j) p0[j] = fp0(0.0, cfg.mesh.node(j));
      Vec z0(cfg.mesh.n_interior());
      for (int j = 0; j < cfg.mesh.n_interior(); ++j) z0[j] = fz0(0.0, cfg.mesh.node(j + 1));
      LinearTriple init{BulkBoundaryFn::from_bulk(cfg.mesh, p0), GridFn0(cfg.mesh, z0)};

      const LinearTrajectory traj = solve_P(init, q, f, cfg.mesh, cfg.time, cfg.nu, cfg.mass);
      write_linear_trajectory_csv((outdir / "trajectory.csv").string(), traj, cfg.mesh, cfg.time);
      write_linear_boundary_csv((outdir / "boundary.csv").string(), traj, cfg.time);
      const EstimateConstants ec = constants(q, cfg.nu, cfg.time.t_end());
      const AprioriReport rep =
          check_apriori(traj, init, q, ec, cfg.mesh, cfg.time, cfg.nu, cfg.mass);
      std::vector<ReportRow> rows = {
          {"step_energy_inequality", rep.step_energy_ok, rep.step_energy_margin, 0.0},
          {"step_increment_inequality", rep.step_increment_ok, rep.step_increment_margin, 0.0},
          {"integrated_bound", rep.integrated_ok, rep.integrated_margin, 0.0},
          {"dt_bounds", rep.dt_bounds_ok, std::min(rep.dt_p_margin, rep.dt_z_margin), 0.0}};
      write_report_csv((outdir / "apriori_report.csv").string(), rows);
    } else {
      StateTriple init = build_initial_state(spec, cfg);
      materialize_targets(spec, cfg, init);

      if (spec.mode == "state") {
        const ControlTriple u = build_controls(spec, cfg);
        const StateTrajectory traj = solve_state(init, u, cfg);
        write_state_trajectory_csv((outdir / "trajectory.csv").string(), traj, cfg.mesh, cfg.time);
        write_state_boundary_csv((outdir / "boundary.csv").string(), traj, cfg.time);
        write_energy_csv((outdir / "energy.csv").string(), traj, cfg.time);
      } else if (spec.mode == "adjoint") {
        const ControlTriple u = build_controls(spec, cfg);
        const StateTrajectory traj = solve_state(init, u, cfg);
        const LinearTrajectory adj = solve_adjoint(traj, u, cfg);
        write_state_trajectory_csv((outdir / "trajectory.csv").string(), traj, cfg.mesh, cfg.time);
        write_linear_trajectory_csv((outdir / "adjoint.csv").string(), adj, cfg.mesh, cfg.time);
        write_linear_boundary_csv((outdir / "adjoint_boundary.csv").string(), adj, cfg.time);
      } else if (spec.mode == "optimize") {
        const ControlTriple u0 = build_controls(spec, cfg);
        const OptResult res = solve_OP(cfg, init, u0, spec.optimizer);
        write_history_csv((outdir / "history.csv").string(), res.history);
        write_state_trajectory_csv((outdir / "trajectory.csv").string(), res.state, cfg.mesh,
                                   cfg.time);
        write_state_boundary_csv((outdir / "boundary.csv").string(), res.state, cfg.time);
        const LinearTrajectory adj = solve_adjoint(res.state, res.controls, cfg);
        write_linear_trajectory_csv((outdir / "adjoint.csv").string(), adj, cfg.mesh, cfg.time);
        const GradientTriple g = gradient(res.state, adj, res.controls, cfg);
        write_gradient_csv((outdir / "gradient.csv").string(),
                           (outdir / "gradient_boundary.csv").string(), g, cfg.mesh, cfg.time);
      } else if (spec.mode == "continuation") {
        ContinuationSchedule sched;
        sched.eps_levels = spec.continuation_eps;
        sched.opt = spec.optimizer;
        const ContinuationResult res = solve_OP0(cfg, init, sched);
        write_history_csv((outdir / "history.csv").string(), res.history);
        write_certificate_csv((outdir / "certificate.csv").string(), res.certificate, cfg.mesh,
                              cfg.time);
        write_state_trajectory_csv((outdir / "trajectory.csv").string(), res.state, cfg.mesh,
                                   cfg.time);
      }
    }

    write_manifest(spec, cfg,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    std::ofstream diag(std::filesystem::path(spec.output_dir) / "failure.txt");
    diag << e.what() << "\n";
    return 1;
  }
}

}  // namespace kwc

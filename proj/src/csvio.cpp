#include "kwc/csvio.hpp"

#include <cstdio>
#include <fstream>

namespace kwc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_state_trajectory_csv(const std::string& path, const StateTrajectory& traj,
                                const Mesh1D& mesh, const TimeGrid& tg) {
  std::ofstream out = open_out(path);
  out << "t,x,eta,theta\n";
  for (int i = 0; i <= traj.steps; ++i) {
    const Vec th = traj.states[i].theta.full();
    for (int j = 0; j < mesh.n_nodes(); ++j)
      out << format_double(tg.t(i)) << ',' << format_double(mesh.node(j)) << ','
          << format_double(traj.states[i].eta.bulk[j]) << ',' << format_double(th[j]) << '\n';
  }
}

void write_state_boundary_csv(const std::string& path, const StateTrajectory& traj,
                              const TimeGrid& tg) {
  std::ofstream out = open_out(path);
  out << "t,eta_Gamma_0,eta_Gamma_1\n";
  for (int i = 0; i <= traj.steps; ++i)
    out << format_double(tg.t(i)) << ',' << format_double(traj.states[i].eta.boundary.at0) << ','
        << format_double(traj.states[i].eta.boundary.at1) << '\n';
}

void write_energy_csv(const std::string& path, const StateTrajectory& traj, const TimeGrid& tg) {
  std::ofstream out = open_out(path);
  out << "t,phi,ghat,work,dissipation\n";
  for (std::size_t i = 0; i < traj.energy.size(); ++i)
    out << format_double(tg.t(static_cast<int>(i))) << ',' << format_double(traj.energy[i].phi)
        << ',' << format_double(traj.energy[i].ghat) << ',' << format_double(traj.energy[i].work)
        << ',' << format_double(traj.energy[i].dissipation) << '\n';
}

void write_linear_trajectory_csv(const std::string& path, const LinearTrajectory& traj,
                                 const Mesh1D& mesh, const TimeGrid& tg) {
  std::ofstream out = open_out(path);
  out << "t,x,p,z\n";
  for (int i = 0; i <= traj.steps; ++i) {
    const Vec z = traj.states[i].z.full();
    for (int j = 0; j < mesh.n_nodes(); ++j)
      out << format_double(tg.t(i)) << ',' << format_double(mesh.node(j)) << ','
          << format_double(traj.states[i].p.bulk[j]) << ',' << format_double(z[j]) << '\n';
  }
}

void write_linear_boundary_csv(const std::string& path, const LinearTrajectory& traj,
                               const TimeGrid& tg) {
  std::ofstream out = open_out(path);
  out << "t,p_Gamma_0,p_Gamma_1\n";
  for (int i = 0; i <= traj.steps; ++i)
    out << format_double(tg.t(i)) << ',' << format_double(traj.states[i].p.boundary.at0) << ','
        << format_double(traj.states[i].p.boundary.at1) << '\n';
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history) {
  std::ofstream out = open_out(path);
  out << "iter,eps,cost,grad_norm,step,optimality_residual\n";
  for (const HistoryRow& r : history)
    out << r.iter << ',' << format_double(r.eps) << ',' << format_double(r.cost) << ','
        << format_double(r.grad_norm) << ',' << format_double(r.step) << ','
        << format_double(r.optimality_residual) << '\n';
}

void write_gradient_csv(const std::string& path, const std::string& boundary_path,
                        const GradientTriple& g, const Mesh1D& mesh, const TimeGrid& tg) {
  std::ofstream out = open_out(path);
  out << "t,x,g_u,g_v\n";
  for (int i = 0; i < tg.n_nodes(); ++i)
    for (int j = 0; j < mesh.n_nodes(); ++j)
      out << format_double(tg.t(i)) << ',' << format_double(mesh.node(j)) << ','
          << format_double(g.u[i][j]) << ',' << format_double(g.v[i][j]) << '\n';
  std::ofstream bout = open_out(boundary_path);
  bout << "t,g_u_Gamma_0,g_u_Gamma_1\n";
  for (int i = 0; i < tg.n_nodes(); ++i)
    bout << format_double(tg.t(i)) << ',' << format_double(g.u_Gamma[i].at0) << ','
         << format_double(g.u_Gamma[i].at1) << '\n';
}

void write_certificate_csv(const std::string& path, const LimitCertificate& cert,
                           const Mesh1D& mesh, const TimeGrid& tg) {
  std::ofstream out = open_out(path);
  out << "t,x,nu_circ,xi_circ,sgn_residual\n";
  for (std::size_t i = 0; i < cert.nu_field.size(); ++i)
    for (int c = 0; c < mesh.n_cells; ++c)
      out << format_double(tg.t(static_cast<int>(i))) << ',' << format_double(mesh.mid(c)) << ','
          << format_double(cert.nu_field[i][c]) << ',' << format_double(cert.xi_field[i][c]) << ','
          << format_double(cert.sgn_field[i][c]) << '\n';
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream out = open_out(path);
  out << "check,status,margin,tolerance\n";
  for (const ReportRow& r : rows)
    out << r.check << ',' << (r.pass ? "pass" : "fail") << ',' << format_double(r.margin) << ','
        << format_double(r.tolerance) << '\n';
}

}  // namespace kwc

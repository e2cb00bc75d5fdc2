#pragma once

// CSV export with 17-significant-digit floats: trajectories, boundary traces,
// energy logs, optimizer histories and continuation certificates.

#include <string>

#include "kwc/linear.hpp"
#include "kwc/optimizer.hpp"
#include "kwc/state.hpp"

namespace kwc {

std::string format_double(double v);

void write_state_trajectory_csv(const std::string& path, const StateTrajectory& traj,
                                const Mesh1D& mesh, const TimeGrid& tg);
void write_state_boundary_csv(const std::string& path, const StateTrajectory& traj,
                              const TimeGrid& tg);
void write_energy_csv(const std::string& path, const StateTrajectory& traj, const TimeGrid& tg);

void write_linear_trajectory_csv(const std::string& path, const LinearTrajectory& traj,
                                 const Mesh1D& mesh, const TimeGrid& tg);
void write_linear_boundary_csv(const std::string& path, const LinearTrajectory& traj,
                               const TimeGrid& tg);

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history);
void write_gradient_csv(const std::string& path, const std::string& boundary_path,
                        const GradientTriple& g, const Mesh1D& mesh, const TimeGrid& tg);
void write_certificate_csv(const std::string& path, const LimitCertificate& cert,
                           const Mesh1D& mesh, const TimeGrid& tg);

struct ReportRow {
  std::string check;
  bool pass = true;
  double margin = 0.0;
  double tolerance = 0.0;
};

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);

}  // namespace kwc

#include "cck/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace cck {

TrialMetrics compute_metrics(const Trajectory& traj, int x_index, int omega_index,
                             double dt) {
  TrialMetrics m;
  if (traj.states.empty()) {
    m.success = false;
    m.note = "empty trajectory";
    return m;
  }
  const double x0 = traj.states.front()[x_index];
  double sum_omega = 0.0;
  for (const auto& x : traj.states) {
    m.max_x_displacement = std::max(m.max_x_displacement, x[x_index] - x0);
    sum_omega += std::abs(x[omega_index]);
  }
  m.avg_abs_angular_velocity = sum_omega / static_cast<double>(traj.states.size());
  for (const auto& u : traj.inputs) m.control_effort += u.squaredNorm() * dt;

  std::vector<double> solves;
  for (double s : traj.solver_ms) {
    if (s > 0.0) solves.push_back(s);
  }
  m.solver_iterations = static_cast<long>(solves.size());
  if (!solves.empty()) {
    double total = 0.0;
    for (double s : solves) total += s;
    m.mean_solve_ms = total / static_cast<double>(solves.size());
    std::sort(solves.begin(), solves.end());
    m.p99_solve_ms = solves[static_cast<std::size_t>(0.99 * (solves.size() - 1))];
  }
  if (traj.aborted) {
    m.success = false;
    m.note = traj.abort_reason;
  }
  return m;
}

nlohmann::json to_json(const TrialMetrics& m) {
  return {{"max_x_displacement", m.max_x_displacement},
          {"avg_abs_angular_velocity", m.avg_abs_angular_velocity},
          {"control_effort", m.control_effort},
          {"mean_solve_ms", m.mean_solve_ms},
          {"p99_solve_ms", m.p99_solve_ms},
          {"solver_iterations", m.solver_iterations},
          {"success", m.success},
          {"note", m.note}};
}

void write_report(const std::string& path, const MetricsReport& report) {
  nlohmann::json j;
  j["experiment"] = report.experiment;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  j["data"] = report.data;
  j["exit_code"] = report.exit_code;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace cck

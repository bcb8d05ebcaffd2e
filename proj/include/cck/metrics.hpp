#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cck/integrator.hpp"

namespace cck {

struct TrialMetrics {
  double max_x_displacement = 0.0;  // max over t of x(t) - x(0)
  double avg_abs_angular_velocity = 0.0;
  double control_effort = 0.0;      // sum ||u||^2 dt
  double mean_solve_ms = 0.0;
  double p99_solve_ms = 0.0;
  long solver_iterations = 0;       // control steps with a recorded solve
  bool success = true;
  std::string note;
};

/// Recomputes trial metrics from a stored trajectory only. x_index and
/// omega_index name the displacement and angular-velocity coordinates.
TrialMetrics compute_metrics(const Trajectory& traj, int x_index, int omega_index,
                             double dt);

struct MetricsReport {
  std::string experiment;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  nlohmann::json data = nlohmann::json::object();
  int exit_code = 0;  // 0 ok, 2 per-trial failures
};

nlohmann::json to_json(const TrialMetrics& m);

void write_report(const std::string& path, const MetricsReport& report);

}  // namespace cck

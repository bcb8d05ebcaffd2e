#pragma once

#include <string>
#include <vector>

#include "cck/integrator.hpp"

namespace cck {

/// CSV columns: t, <state names...>, <u_0..u_{r-1}>, contact_count, solve_ms.
/// Numbers use shortest round-trip formatting; export -> parse -> export is
/// bytewise identical.
void write_trace_csv(const std::string& path, const Trajectory& traj,
                     const std::vector<std::string>& state_names, int input_dim);

Trajectory read_trace_csv(const std::string& path, int state_dim, int input_dim);

/// Two stacked panels, x-displacement and contact count over time.
void write_trace_svg(const std::string& path, const Trajectory& traj, int x_index);

}  // namespace cck

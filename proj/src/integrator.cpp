#include "cck/integrator.hpp"

#include <cmath>

namespace cck {

namespace {
bool finite(const VectorXd& v) { return v.allFinite(); }
}  // namespace

VectorXd integrate_step(const ContinuousDynamics& dyn, const VectorXd& x,
                        const VectorXd& u, double t, double h) {
  const auto& f = dyn.derivative;
  VectorXd k1 = f(x, u, t);
  VectorXd k2 = f(x + 0.5 * h * k1, u, t + 0.5 * h);
  VectorXd k3 = f(x + 0.5 * h * k2, u, t + 0.5 * h);
  VectorXd k4 = f(x + h * k3, u, t + h);
  if (!finite(k1) || !finite(k2) || !finite(k3) || !finite(k4)) {
    throw IntegrationDivergedError(t);
  }
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory simulate(const ContinuousDynamics& dyn, const VectorXd& x0,
                    const Controller& controller, const SimulateOptions& opt) {
  const double h = opt.step;
  const long n_steps = std::lround(opt.duration / h);
  const long ctrl_every = std::lround(opt.control_period / h);
  if (ctrl_every < 1 || std::abs(ctrl_every * h - opt.control_period) > 1e-12) {
    throw std::invalid_argument("control_period must be an integer multiple of step");
  }
  const int stride = std::max(1, opt.record_stride);

  Trajectory traj;
  traj.times.reserve(n_steps / stride + 2);
  traj.states.reserve(n_steps / stride + 2);

  VectorXd x = x0;
  VectorXd u = VectorXd::Zero(dyn.input_dim);
  double last_solver_ms = 0.0;

  auto record = [&](long k) {
    traj.times.push_back(k * h);
    traj.states.push_back(x);
    if (opt.contact_counter) traj.contact_counts.push_back(opt.contact_counter(x));
  };

  record(0);
  for (long k = 0; k < n_steps; ++k) {
    const double t = k * h;
    if (k % ctrl_every == 0) {
      last_solver_ms = 0.0;
      try {
        u = controller ? controller(x, t) : VectorXd::Zero(dyn.input_dim);
        if (opt.solver_timer) last_solver_ms = opt.solver_timer();
      } catch (const std::exception& e) {
        traj.aborted = true;
        traj.abort_reason = e.what();
        return traj;
      }
    }
    try {
      x = integrate_step(dyn, x, u, t, h);
    } catch (const std::exception& e) {
      // Plant-side failures (e.g. a spoke driven to the barrier depth) end
      // the trial; the partial record is still meaningful.
      traj.aborted = true;
      traj.abort_reason = e.what();
      return traj;
    }
    if ((k + 1) % stride == 0) {
      traj.inputs.push_back(u);
      traj.solver_ms.push_back(last_solver_ms);
      last_solver_ms = 0.0;
      record(k + 1);
    }
  }
  return traj;
}

}  // namespace cck

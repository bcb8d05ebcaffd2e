#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cck {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Continuous-time dynamics ẋ = f(x, u, t). The derivative callback must be
/// deterministic and return a vector of length state_dim.
struct ContinuousDynamics {
  int state_dim = 0;
  int input_dim = 0;
  std::function<VectorXd(const VectorXd&, const VectorXd&, double)> derivative;
};

struct IntegrationDivergedError : std::runtime_error {
  double time;
  explicit IntegrationDivergedError(double t)
      : std::runtime_error("non-finite derivative at t=" + std::to_string(t)),
        time(t) {}
};

/// Fixed-step trajectory record. states has one more entry than inputs;
/// solver_ms is zero for steps where no controller ran.
struct Trajectory {
  std::vector<double> times;
  std::vector<VectorXd> states;
  std::vector<VectorXd> inputs;
  std::vector<int> contact_counts;
  std::vector<double> solver_ms;
  bool aborted = false;   // controller threw; record is partial
  std::string abort_reason;

  std::size_t size() const { return times.size(); }
};

/// One classical RK4 step with zero-order-hold input.
VectorXd integrate_step(const ContinuousDynamics& dyn, const VectorXd& x,
                        const VectorXd& u, double t, double h);

using Controller = std::function<VectorXd(const VectorXd&, double)>;
using ContactCounter = std::function<int(const VectorXd&)>;

struct SimulateOptions {
  double duration = 1.0;
  double step = 1e-4;
  double control_period = 1e-2;  // must be an integer multiple of step
  ContactCounter contact_counter;        // optional diagnostic
  std::function<double()> solver_timer;  // optional, ms for the last control call
  int record_stride = 1;  // record every k-th control-period boundary? 1 = every sim step
};

/// Simulate with zero-order-hold control updated every control_period.
/// Records every sim step. Controller exceptions abort with a partial record.
Trajectory simulate(const ContinuousDynamics& dyn, const VectorXd& x0,
                    const Controller& controller, const SimulateOptions& opt);

}  // namespace cck

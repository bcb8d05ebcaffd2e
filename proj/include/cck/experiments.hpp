#pragma once

#include <cstdint>
#include <string>

#include "cck/config.hpp"
#include "cck/integrator.hpp"
#include "cck/lifting.hpp"
#include "cck/metrics.hpp"
#include "cck/model_fit.hpp"
#include "cck/mpc.hpp"
#include "cck/pusher_slider.hpp"
#include "cck/rimless_wheel.hpp"

namespace cck {

enum class FitMethod { CckAnalytic, CckJoint, CckNoCompensation, Dmdc, LocalLinearization };
FitMethod fit_method_from_string(const std::string& name);
std::string to_string(FitMethod m);

// ---------------------------------------------------------------------------
// Rimless wheel experiment plumbing
// ---------------------------------------------------------------------------

struct WheelExperiment {
  WheelParams wp;
  WheelContactParams cp;
  double sim_step = 1e-4;
  double control_period = 0.01;
  int horizon = 20;
  double torque_limit = 1.0;   // N m, symmetric input box
  double ref_speed = 1.0;      // m/s hub reference
  double roll_radius = 0.213;  // effective rolling radius of the vaulting gait
  double ref_height = 0.21;    // mean hub height while rolling
  double phase_lead = 0.2;     // rad; reference phase leads the hub angle
  int n_rbf = 400;
  double width_scale = 2.0;  // RBF width vs median nearest-neighbor distance
  int data_traj = 200;
  double data_duration = 4.0;
  double ridge_scale = 1.0;    // multiplies the default scale-aware ridge
  // cost weights on (x, xd, y, theta, thetad, psi, psid)
  double w_x = 4.0, w_xd = 4.0, w_y = 0.0, w_theta = 0.0, w_thetad = 0.05;
  double w_psi = 0.2, w_psid = 1e-5;
  double w_emb = 20.0;         // weight on the lifted feature rows
  double w_r = 0.01;           // per-torque input weight
  std::uint64_t seed = 1;
};

WheelExperiment wheel_experiment_from_config(const Config& cfg);
PlantSchema wheel_schema();
double wheel_static_penetration(const WheelParams& wp, const WheelContactParams& cp);

/// Excitation used for identification data: randomized drops, spins and
/// rolls under piecewise-constant random torques.
ExcitationPolicy wheel_excitation(const WheelExperiment& ex);

/// Fitted models for one experiment; built once and reused across methods.
struct WheelRig {
  WheelExperiment ex;
  ContinuousDynamics dyn;
  Dictionary dict;
  SnapshotDataset dataset;
  MatrixXd B_p;
  CckModel cck;        // autonomous fit + analytic compensation
  CckModel cck_joint;  // joint data-driven fit
  LinearModel dmdc;
  FitReport fit_report;
};

WheelRig build_wheel_rig(const WheelExperiment& ex);

MpcConfig wheel_mpc_config(const WheelRig& rig);

/// Full reference state of the hub ramp at time t.
VectorXd wheel_reference_state(const WheelExperiment& ex, const VectorXd& x0, double t);

/// Monotone reference phase; advances at the commanded rolling rate but stays
/// within phase_lead of the actual hub angle.
struct WheelReferenceClock {
  double phase = 0.0;
  bool initialized = false;
};

/// Anchor state for the receding-horizon reference: the current state with
/// the hub angle replaced by the clamped reference phase.
VectorXd wheel_reference_anchor(const WheelExperiment& ex, const VectorXd& x,
                                WheelReferenceClock& clock);

/// Closed-loop run of one fit method from x0. LocalLinearization relinearizes
/// at every control step.
Trajectory run_wheel_closed_loop(const WheelRig& rig, FitMethod method,
                                 const VectorXd& x0, double duration,
                                 int horizon_override = 0);

/// At-rest state at hub angle theta with the lowest spoke at the static
/// penetration depth.
VectorXd wheel_rest_state(const WheelExperiment& ex, double theta);

/// Seeded start states near the reference for ablation trials.
VectorXd wheel_trial_start(const WheelExperiment& ex, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pusher-slider experiment plumbing
// ---------------------------------------------------------------------------

struct PusherExperiment {
  SliderParams sp;
  double sim_step = 1e-3;
  double control_period = 0.1;
  int horizon = 10;
  double speed_limit = 0.4;  // m/s pusher velocity box
  int n_rbf = 60;
  double width_scale = 2.0;
  int data_traj = 150;
  double data_duration = 8.0;
  double ridge_scale = 1.0;
  double w_pos = 10.0;       // integrated slider x, y weight
  double w_vel = 0.5;
  double w_r = 1.0;
  std::uint64_t seed = 1;
};

PusherExperiment pusher_experiment_from_config(const Config& cfg,
                                               SliderShape shape = SliderShape::Square);
PlantSchema pusher_schema();
ExcitationPolicy pusher_excitation(const PusherExperiment& ex);

struct PusherRig {
  PusherExperiment ex;
  ContinuousDynamics dyn;
  Dictionary dict;
  SnapshotDataset dataset;
  MatrixXd B_p;
  CckModel cck;
  CckModel cck_joint;
  FitReport fit_report;
};

PusherRig build_pusher_rig(const PusherExperiment& ex);

struct PusherTask {
  Eigen::Vector2d goal{0.3, 0.0};
  VectorXd x0;             // 8-dim start state
  double duration = 12.0;
  double w_act = 50.0;     // relative pusher position rows
  double w_pos = 10.0, w_vel = 0.5, w_r = 1.0;
  SliderParams true_params;  // plant used in simulation (model mismatch runs)
};

Trajectory run_pusher_closed_loop(const PusherRig& rig, const PusherTask& task);

/// Trace classification for push-vs-shove and dribbling predicates.
struct PushTraceStats {
  double time_to_goal_band = -1.0;   // first entry into the band, -1 if never
  bool stays_in_band = false;        // inside the band at the end of the run
  double longest_contact_gap = 0.0;  // seconds without contact while approaching
  double contact_fraction = 0.0;     // contact steps / approach steps
  int contact_episodes = 0;
  double final_distance = 0.0;
  double adverse_displacement = 0.0;  // motion away from the goal before first contact
};

PushTraceStats analyze_push_trace(const Trajectory& traj, const Eigen::Vector2d& goal,
                                  double band, double dt);

// ---------------------------------------------------------------------------
// Study drivers (CLI surface)
// ---------------------------------------------------------------------------

MetricsReport run_wheel_ablation(const Config& cfg, const std::string& out_dir);
MetricsReport run_pusher_suite(const Config& cfg, const std::string& out_dir);
MetricsReport run_benchmark(const Config& cfg, const std::string& out_dir);
MetricsReport run_stiffness_sweep(const Config& cfg, const std::string& out_dir);

}  // namespace cck

#include "cck/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <random>

#include "cck/trace_io.hpp"

namespace cck {

FitMethod fit_method_from_string(const std::string& name) {
  if (name == "cck-analytic") return FitMethod::CckAnalytic;
  if (name == "cck-joint") return FitMethod::CckJoint;
  if (name == "cck-no-compensation") return FitMethod::CckNoCompensation;
  if (name == "dmdc") return FitMethod::Dmdc;
  if (name == "local-linearization") return FitMethod::LocalLinearization;
  throw std::invalid_argument("unknown fit method: " + name);
}

std::string to_string(FitMethod m) {
  switch (m) {
    case FitMethod::CckAnalytic: return "cck-analytic";
    case FitMethod::CckJoint: return "cck-joint";
    case FitMethod::CckNoCompensation: return "cck-no-compensation";
    case FitMethod::Dmdc: return "dmdc";
    case FitMethod::LocalLinearization: return "local-linearization";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Rimless wheel
// ---------------------------------------------------------------------------

PlantSchema wheel_schema() {
  using namespace wheel_idx;
  PlantSchema s;
  s.id = "rimless-wheel";
  s.state_dim = kDim;
  s.input_dim = 6;
  for (int i = 0; i < 6; ++i) s.actuator_idx.push_back(kPsi0 + i);
  for (int i = 0; i < 6; ++i) s.actuator_idx.push_back(kPsid0 + i);
  s.plant_idx = {kX, kY, kTheta, kXd, kYd, kThetad};
  // Contact geometry is periodic in the hub angle, so the angle enters the
  // observables through sin/cos; x never does (translation invariance).
  s.rbf_features.push_back(Feature::linear(kY));
  s.rbf_features.push_back(Feature::sine(kTheta));
  s.rbf_features.push_back(Feature::cosine(kTheta));
  for (int i = 0; i < 6; ++i) s.rbf_features.push_back(Feature::linear(kPsi0 + i));
  s.rbf_features.push_back(Feature::linear(kXd));
  s.rbf_features.push_back(Feature::linear(kYd));
  s.rbf_features.push_back(Feature::linear(kThetad));
  s.state_names = {"x", "y", "theta", "psi_1", "psi_2", "psi_3", "psi_4",
                   "psi_5", "psi_6", "xd", "yd", "thetad", "psid_1", "psid_2",
                   "psid_3", "psid_4", "psid_5", "psid_6"};
  return s;
}

double wheel_static_penetration(const WheelParams& wp, const WheelContactParams& cp) {
  return (2.0 * cp.l_max / M_PI) *
         std::atan(wp.hub_mass * wp.gravity / (2.0 * cp.k_y));
}

WheelExperiment wheel_experiment_from_config(const Config& cfg) {
  WheelExperiment ex;
  ex.wp.hub_mass = cfg.number("wheel.mass", ex.wp.hub_mass);
  ex.wp.body_inertia = cfg.number("wheel.inertia", ex.wp.body_inertia);
  ex.wp.rotor_inertia = cfg.number("wheel.rotor_inertia", ex.wp.rotor_inertia);
  ex.wp.spoke_length = cfg.number("wheel.spoke_length", ex.wp.spoke_length);
  ex.wp.screw_ratio = cfg.number("wheel.screw_ratio", ex.wp.screw_ratio);
  ex.wp.phi_min = cfg.number("wheel.phi_min", ex.wp.phi_min);
  ex.wp.phi_max = cfg.number("wheel.phi_max", ex.wp.phi_max);
  ex.cp.k_y = cfg.number("contact.k_y", ex.cp.k_y);
  ex.cp.b_y = cfg.number("contact.b_y", ex.cp.b_y);
  ex.cp.l_max = cfg.number("contact.l_max", ex.cp.l_max);
  ex.cp.mu = cfg.number("contact.mu", ex.cp.mu);
  ex.cp.lambda = cfg.number("contact.lambda", ex.cp.lambda);
  ex.sim_step = cfg.number("sim.step", ex.sim_step);
  ex.control_period = cfg.number("mpc.period", ex.control_period);
  ex.horizon = static_cast<int>(cfg.integer("mpc.horizon", ex.horizon));
  ex.torque_limit = cfg.number("mpc.torque_limit", ex.torque_limit);
  ex.ref_speed = cfg.number("mpc.ref_speed", ex.ref_speed);
  ex.n_rbf = static_cast<int>(cfg.integer("dictionary.n_rbf", ex.n_rbf));
  ex.width_scale = cfg.number("dictionary.width_scale", ex.width_scale);
  ex.data_traj = static_cast<int>(cfg.integer("data.n_traj", ex.data_traj));
  ex.data_duration = cfg.number("data.duration", ex.data_duration);
  ex.ridge_scale = cfg.number("fit.ridge_scale", ex.ridge_scale);
  ex.w_x = cfg.number("mpc.w_x", ex.w_x);
  ex.w_xd = cfg.number("mpc.w_xd", ex.w_xd);
  ex.w_y = cfg.number("mpc.w_y", ex.w_y);
  ex.w_theta = cfg.number("mpc.w_theta", ex.w_theta);
  ex.w_thetad = cfg.number("mpc.w_thetad", ex.w_thetad);
  ex.w_psi = cfg.number("mpc.w_psi", ex.w_psi);
  ex.w_psid = cfg.number("mpc.w_psid", ex.w_psid);
  ex.w_emb = cfg.number("mpc.w_emb", ex.w_emb);
  ex.w_r = cfg.number("mpc.w_r", ex.w_r);
  ex.seed = static_cast<std::uint64_t>(cfg.integer("seed", ex.seed));
  return ex;
}

ExcitationPolicy wheel_excitation(const WheelExperiment& ex) {
  ExcitationPolicy pol;
  pol.initial_state = [ex](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unif = [&rng](double lo, double hi) {
      return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    using namespace wheel_idx;
    const double theta = unif(-M_PI, M_PI);
    VectorXd x = VectorXd::Zero(kDim);
    x[kTheta] = theta;
    double lowest = 1.0;
    for (int i = 0; i < WheelParams::kSpokes; ++i) {
      lowest = std::min(
          lowest, std::sin(theta + WheelParams::kPhase + i * WheelParams::kSpacing));
    }
    x[kY] = ex.cp.floor_y - wheel_static_penetration(ex.wp, ex.cp) -
            ex.wp.spoke_length * lowest;
    const double draw = unif(0.0, 1.0);
    if (draw < 0.5) {
      // rolling regime: hub speed up to well above the reference speed
      x[kXd] = unif(-1.0, 3.5);
      x[kThetad] = -(x[kXd] / ex.wp.spoke_length) * unif(0.7, 1.3);
      x[kYd] = unif(-0.1, 0.1);
    } else {
      // loitering / small hops
      x[kY] += unif(0.0, 0.02);
      x[kXd] = unif(-0.8, 0.8);
      x[kYd] = unif(-0.2, 0.1);
      x[kThetad] = unif(-4.0, 4.0);
    }
    for (int i = 0; i < 6; ++i) {
      x[kPsi0 + i] = unif(-5.0, 5.0);
      x[kPsid0 + i] = unif(-20.0, 20.0);
    }
    return x;
  };
  pol.make_controller = [ex](std::uint64_t seed) -> Controller {
    // Two exploration modes. Random torques alone back-drive the spokes to
    // their travel stops and never visit the vaulting gait, so half the
    // trajectories run a randomized phase-based policy (extend spokes behind
    // the hub, retract the ones ahead) and the rest PD-track random spoke
    // setpoints. Both carry resampled torque noise.
    struct State {
      std::mt19937_64 rng;
      bool phase_policy = false;
      double direction = 1.0;     // +1 rolls in +x
      double extension = 6.0;     // psi setpoint magnitude
      double kp = 0.4, kd = 0.01;
      VectorXd target = VectorXd::Zero(6);
      VectorXd noise = VectorXd::Zero(6);
      double next_resample = 0.0;
    };
    auto st = std::make_shared<State>();
    st->rng.seed(seed ^ 0x9e3779b97f4a7c15ull);
    {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      st->phase_policy = unif(st->rng) < 0.5;
      st->direction = unif(st->rng) < 0.75 ? 1.0 : -1.0;
      st->extension = 3.0 + 4.0 * unif(st->rng);
      st->kp = 0.25 + 0.35 * unif(st->rng);
    }
    const double lim = ex.torque_limit;
    return [st, lim](const VectorXd& x, double t) {
      using namespace wheel_idx;
      if (t >= st->next_resample) {
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int i = 0; i < 6; ++i) {
          st->target[i] = 6.0 * unif(st->rng);
          st->noise[i] = 0.3 * lim * unif(st->rng);
        }
        st->next_resample = t + 0.25;
      }
      VectorXd u(6);
      for (int i = 0; i < 6; ++i) {
        double target = st->target[i];
        if (st->phase_policy) {
          const double a = x[kTheta] + WheelParams::kPhase + i * WheelParams::kSpacing;
          target = 0.0;
          if (std::sin(a) < -0.3) {
            target = (st->direction * std::cos(a) < 0.0) ? st->extension : -st->extension;
          }
        }
        u[i] = st->kp * (target - x[kPsi0 + i]) - st->kd * x[kPsid0 + i] + st->noise[i];
        u[i] = std::clamp(u[i], -lim, lim);
      }
      return u;
    };
  };
  return pol;
}

namespace {

MatrixXd collect_feature_samples(const ContinuousDynamics& dyn,
                                 const ExcitationPolicy& pol, const Dictionary& proto,
                                 int n_traj, double duration, double dt,
                                 double sim_step, std::uint64_t seed) {
  std::vector<VectorXd> feats;
  for (int tr = 0; tr < n_traj; ++tr) {
    SimulateOptions opt;
    opt.duration = duration;
    opt.step = sim_step;
    opt.control_period = dt;
    opt.record_stride = std::lround(dt / sim_step);
    const std::uint64_t tseed = seed * 2654435761ull + tr;
    try {
      Trajectory traj = simulate(dyn, pol.initial_state(tseed),
                                 pol.make_controller(tseed), opt);
      if (traj.aborted) continue;
      for (const auto& x : traj.states) feats.push_back(proto.features(x));
    } catch (const std::exception&) {
      // skip trajectories that blow through the contact barrier
    }
  }
  if (feats.empty()) throw std::runtime_error("pilot rollouts produced no data");
  MatrixXd out(feats.front().size(), feats.size());
  for (std::size_t i = 0; i < feats.size(); ++i) out.col(i) = feats[i];
  return out;
}

Dictionary build_dictionary_from_pilot(const ContinuousDynamics& dyn,
                                       const ExcitationPolicy& pol,
                                       const PlantSchema& schema, int n_rbf,
                                       double width_scale, double dt,
                                       double sim_step, std::uint64_t seed) {
  Dictionary proto = make_rbf_dictionary(schema, MatrixXd(), VectorXd(), true);
  const MatrixXd samples =
      collect_feature_samples(dyn, pol, proto, 20, 2.0, dt, sim_step, seed);
  MatrixXd centers;
  VectorXd widths;
  centers_from_data(samples, n_rbf, seed + 7, width_scale, centers, widths);
  return make_rbf_dictionary(schema, centers, widths, true);
}

SnapshotDataset robust_dataset(const ContinuousDynamics& dyn,
                               const ExcitationPolicy& pol, const Dictionary& dict,
                               const ContactCounter& modes, DatasetOptions opt) {
  // Per-trajectory simulation failures (barrier saturation under aggressive
  // excitation) drop that trajectory and keep the rest.
  SnapshotDataset all;
  bool first = true;
  for (int tr = 0; tr < opt.n_traj; ++tr) {
    DatasetOptions one = opt;
    one.n_traj = 1;
    one.seed = opt.seed + tr * 1000003ull;
    SnapshotDataset part;
    try {
      part = generate_dataset(dyn, pol, dict, modes, one);
    } catch (const std::exception&) {
      continue;
    }
    if (part.empty_flag) continue;
    if (first) {
      all = part;
      all.seed = opt.seed;
      for (auto& t : all.traj_index) t = tr;
      first = false;
      continue;
    }
    const long n0 = all.count(), n1 = part.count();
    all.x0.conservativeResize(Eigen::NoChange, n0 + n1);
    all.x1.conservativeResize(Eigen::NoChange, n0 + n1);
    all.u.conservativeResize(Eigen::NoChange, n0 + n1);
    all.z0.conservativeResize(Eigen::NoChange, n0 + n1);
    all.z1.conservativeResize(Eigen::NoChange, n0 + n1);
    all.x0.rightCols(n1) = part.x0;
    all.x1.rightCols(n1) = part.x1;
    all.u.rightCols(n1) = part.u;
    all.z0.rightCols(n1) = part.z0;
    all.z1.rightCols(n1) = part.z1;
    for (long i = 0; i < n1; ++i) all.traj_index.push_back(tr);
    for (const auto& [mode, n] : part.mode_histogram) all.mode_histogram[mode] += n;
    all.empty_flag = false;
  }
  return all;
}

}  // namespace

WheelRig build_wheel_rig(const WheelExperiment& ex) {
  WheelRig rig;
  rig.ex = ex;
  rig.dyn = make_wheel_dynamics(ex.wp, ex.cp);
  const ExcitationPolicy pol = wheel_excitation(ex);
  rig.dict = build_dictionary_from_pilot(rig.dyn, pol, wheel_schema(), ex.n_rbf,
                                         ex.width_scale, ex.control_period,
                                         ex.sim_step, ex.seed);
  DatasetOptions dopt;
  dopt.n_traj = ex.data_traj;
  dopt.duration = ex.data_duration;
  dopt.dt = ex.control_period;
  dopt.sim_step = ex.sim_step;
  dopt.seed = ex.seed + 100;
  const auto modes = [ex](const VectorXd& x) {
    return wheel_contact_count(x, ex.wp, ex.cp);
  };
  rig.dataset = robust_dataset(rig.dyn, pol, rig.dict, modes, dopt);

  ActuatorSpec spec;
  spec.kind = ActuatorSpec::Kind::TorqueDoubleIntegrator;
  spec.channels = 6;
  spec.inertia = ex.wp.rotor_inertia;
  rig.B_p = build_Bp(spec, ex.control_period);

  const double ridge = ex.ridge_scale * default_ridge(rig.dataset.z0);
  rig.cck.A = fit_A_autonomous(rig.dataset, rig.dict, rig.B_p, ridge, &rig.fit_report);
  rig.cck.B_p = rig.B_p;
  rig.cck.B_g = build_Bg(rig.cck.A, rig.B_p);
  rig.cck.dict = rig.dict;
  rig.cck.dt = ex.control_period;

  rig.cck_joint.dict = rig.dict;
  rig.cck_joint.dt = ex.control_period;
  rig.cck_joint.B_p = rig.B_p;
  fit_joint(rig.dataset, rig.B_p, ridge, rig.cck_joint.A, rig.cck_joint.B_g);

  rig.dmdc = fit_dmdc(rig.dataset, ridge);
  return rig;
}

MpcConfig wheel_mpc_config(const WheelRig& rig) {
  const WheelExperiment& ex = rig.ex;
  MpcConfig cfg;
  cfg.horizon = ex.horizon;
  cfg.dt = ex.control_period;
  const int nz = rig.dict.lifted_dim();
  cfg.q_weights = VectorXd::Zero(nz);
  for (int i = 0; i < 6; ++i) cfg.q_weights[i] = ex.w_psi;
  for (int i = 6; i < 12; ++i) cfg.q_weights[i] = ex.w_psid;
  cfg.q_weights[12] = ex.w_x;
  cfg.q_weights[13] = ex.w_y;
  cfg.q_weights[14] = ex.w_theta;
  cfg.q_weights[15] = ex.w_xd;
  cfg.q_weights[16] = 0.0;
  cfg.q_weights[17] = ex.w_thetad;
  // Tracking the feature rows of the rolling reference is what makes the
  // torque allocation phase-aware: the condensed input map is constant, so
  // gait phase can only enter the optimum through the lifted state error.
  for (int i = 18; i < nz; ++i) cfg.q_weights[i] = ex.w_emb;
  cfg.r_weights = VectorXd::Constant(6, ex.w_r);
  cfg.u_min = VectorXd::Constant(6, -ex.torque_limit);
  cfg.u_max = VectorXd::Constant(6, ex.torque_limit);
  // Keep the plan inside the spoke travel range; beyond it the plant clamps
  // and the fitted model extrapolates.
  const double inf = std::numeric_limits<double>::infinity();
  cfg.z_min = VectorXd::Constant(nz, -inf);
  cfg.z_max = VectorXd::Constant(nz, inf);
  const double psi_span =
      0.95 * std::min(ex.wp.phi_max - ex.wp.spoke_length,
                      ex.wp.spoke_length - ex.wp.phi_min) /
      ex.wp.screw_ratio;
  for (int i = 0; i < 6; ++i) {
    cfg.z_min[i] = -psi_span;
    cfg.z_max[i] = psi_span;
  }
  // Loose tolerance: control-grade solves; the spoke-travel rows make exact
  // convergence expensive and the plan is re-solved every 10 ms anyway.
  cfg.qp.eps = 1e-4;
  cfg.qp.max_iterations = 500;
  return cfg;
}

VectorXd wheel_reference_anchor(const WheelExperiment& ex, const VectorXd& x,
                                WheelReferenceClock& clock) {
  using namespace wheel_idx;
  const double theta = x[kTheta];
  const double rate = -ex.ref_speed / ex.roll_radius;  // rolling +x is clockwise
  if (!clock.initialized) {
    clock.phase = theta;
    clock.initialized = true;
  }
  // The reference phase is a monotone clock: it only ever advances in the
  // commanded rolling direction, but is clamped to within [0, phase_lead] of
  // the actual hub angle. The bounded lead removes the parked fixed point (a
  // standing wheel always sees a slightly advanced gait template) while the
  // monotonicity pins the direction; a freely hub-anchored lead is direction
  // neutral and can lock onto the mirrored gait.
  double p = clock.phase + rate * ex.control_period;
  if (rate <= 0.0) {
    p = std::max(p, theta - ex.phase_lead);  // cap the lead
    p = std::min(p, clock.phase);            // ratchet: never retreat
    p = std::min(p, theta);                  // keep up when the hub is ahead
  } else {
    p = std::min(p, theta + ex.phase_lead);
    p = std::max(p, clock.phase);
    p = std::max(p, theta);
  }
  clock.phase = p;
  VectorXd anchor = x;
  anchor[kTheta] = clock.phase;
  return anchor;
}

VectorXd wheel_reference_state(const WheelExperiment& ex, const VectorXd& x0, double t) {
  using namespace wheel_idx;
  VectorXd ref = VectorXd::Zero(kDim);
  ref[kX] = x0[kX] + ex.ref_speed * t;
  ref[kY] = ex.cp.floor_y + ex.ref_height;
  ref[kXd] = ex.ref_speed;
  // Rolling in +x turns the hub clockwise. The hub angle advances from the
  // current angle so the lifted reference carries the rolling phase; the
  // rotation rate uses the effective rolling radius of the gait, which is
  // larger than the resting spoke length because the stance spokes extend.
  ref[kThetad] = -ex.ref_speed / ex.roll_radius;
  ref[kTheta] = x0[kTheta] + ref[kThetad] * t;
  // Kinematic rolling template for the spokes: extend the low spokes behind
  // the hub, retract the low spokes ahead of it. Pure hub references leave
  // the lifted reference unreachable (it would have to roll rigidly on
  // neutral spokes), which makes standing still cheaper than vaulting.
  const double dir = (ex.ref_speed >= 0.0) ? 1.0 : -1.0;
  const double psi_span = 0.9 * std::min(ex.wp.phi_max - ex.wp.spoke_length,
                                         ex.wp.spoke_length - ex.wp.phi_min) /
                          ex.wp.screw_ratio;
  for (int i = 0; i < WheelParams::kSpokes; ++i) {
    const double a = ref[kTheta] + WheelParams::kPhase + i * WheelParams::kSpacing;
    if (std::sin(a) < -0.3) {
      ref[kPsi0 + i] = (dir * std::cos(a) < 0.0) ? psi_span : -psi_span;
    }
  }
  return ref;
}

namespace {

struct ClosedLoopHooks {
  double last_ms = 0.0;
};

// Local-linearization MPC baseline: refit the affine model at every control
// step and solve the same box QP on the raw state.
class LocalLinearizationMpc {
 public:
  LocalLinearizationMpc(ContinuousDynamics dyn, MpcConfig cfg, double sim_step)
      : dyn_(std::move(dyn)), cfg_(std::move(cfg)), sim_step_(sim_step),
        last_u_(VectorXd::Zero(dyn_.input_dim)) {}

  VectorXd step(const VectorXd& x, const MatrixXd& x_ref, double* ms) {
    const auto t0 = std::chrono::steady_clock::now();
    VectorXd u = last_u_;
    try {
      const LinearModel lm = local_linearize(dyn_, x, last_u_, cfg_.dt, sim_step_);
      CondensedMpc mpc(lm.A, lm.B, lm.c, cfg_);
      const QpProblem qp = mpc.build(x, x_ref);
      std::optional<QpWarmStart> warm;
      if (warm_u_.size() == qp.H.rows()) warm = QpWarmStart{warm_u_, VectorXd()};
      const QpResult res = solve_qp(qp, warm, cfg_.qp);
      if (res.status != QpStatus::NumericalFailure) {
        u = res.u.head(dyn_.input_dim);
        warm_u_ = res.u;
      }
    } catch (const std::exception&) {
      // barrier-adjacent states can break the finite-difference Jacobian;
      // hold the last input
    }
    last_u_ = u;
    if (ms) {
      *ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    }
    return u;
  }

 private:
  ContinuousDynamics dyn_;
  MpcConfig cfg_;
  double sim_step_;
  VectorXd last_u_;
  VectorXd warm_u_;
};

}  // namespace

Trajectory run_wheel_closed_loop(const WheelRig& rig, FitMethod method,
                                 const VectorXd& x0, double duration,
                                 int horizon_override) {
  const WheelExperiment& ex = rig.ex;
  MpcConfig cfg = wheel_mpc_config(rig);
  if (horizon_override > 0) cfg.horizon = horizon_override;
  const int N = cfg.horizon;
  auto hooks = std::make_shared<ClosedLoopHooks>();

  Controller controller;
  if (method == FitMethod::LocalLinearization) {
    MpcConfig raw = cfg;
    using namespace wheel_idx;
    raw.z_min = VectorXd::Constant(kDim, -std::numeric_limits<double>::infinity());
    raw.z_max = VectorXd::Constant(kDim, std::numeric_limits<double>::infinity());
    for (int i = 0; i < 6; ++i) {
      raw.z_min[kPsi0 + i] = cfg.z_min[i];
      raw.z_max[kPsi0 + i] = cfg.z_max[i];
    }
    raw.q_weights = VectorXd::Zero(kDim);
    raw.q_weights[kX] = ex.w_x;
    raw.q_weights[kY] = ex.w_y;
    raw.q_weights[kTheta] = ex.w_theta;
    raw.q_weights[kXd] = ex.w_xd;
    raw.q_weights[kThetad] = ex.w_thetad;
    for (int i = 0; i < 6; ++i) {
      raw.q_weights[kPsi0 + i] = ex.w_psi;
      raw.q_weights[kPsid0 + i] = ex.w_psid;
    }
    auto ll = std::make_shared<LocalLinearizationMpc>(rig.dyn, raw, ex.sim_step);
    auto clock = std::make_shared<WheelReferenceClock>();
    controller = [ll, ex, N, hooks, clock](const VectorXd& x, double) {
      MatrixXd ref(wheel_idx::kDim, N + 1);
      const VectorXd anchor = wheel_reference_anchor(ex, x, *clock);
      for (int j = 0; j <= N; ++j) {
        ref.col(j) = wheel_reference_state(ex, anchor, j * ex.control_period);
      }
      return ll->step(x, ref, &hooks->last_ms);
    };
  } else {
    MatrixXd A;
    MatrixXd B;
    if (method == FitMethod::Dmdc) {
      A = rig.dmdc.A;
      B = rig.dmdc.B;
    } else {
      const CckModel& m = (method == FitMethod::CckJoint) ? rig.cck_joint : rig.cck;
      A = m.A;
      B = (method == FitMethod::CckNoCompensation) ? m.without_compensation().B()
                                                   : m.B();
    }
    auto ctrl = std::make_shared<MpcController>(A, B, VectorXd(), rig.dict, cfg);
    const Dictionary dict = rig.dict;
    auto clock = std::make_shared<WheelReferenceClock>();
    controller = [ctrl, dict, ex, N, hooks, clock](const VectorXd& x, double) {
      MatrixXd z_ref(dict.lifted_dim(), N + 1);
      const VectorXd anchor = wheel_reference_anchor(ex, x, *clock);
      for (int j = 0; j <= N; ++j) {
        z_ref.col(j) =
            dict.lift(wheel_reference_state(ex, anchor, j * ex.control_period));
      }
      MpcDiagnostics diag;
      const VectorXd u = ctrl->step(x, z_ref, VectorXd(), MatrixXd(), &diag);
      hooks->last_ms = diag.solve_ms;
      return u;
    };
  }

  SimulateOptions opt;
  opt.duration = duration;
  opt.step = ex.sim_step;
  opt.control_period = ex.control_period;
  opt.record_stride = std::lround(ex.control_period / ex.sim_step);
  opt.contact_counter = [ex](const VectorXd& x) {
    return wheel_contact_count(x, ex.wp, ex.cp);
  };
  opt.solver_timer = [hooks]() { return hooks->last_ms; };
  return simulate(rig.dyn, x0, controller, opt);
}

VectorXd wheel_rest_state(const WheelExperiment& ex, double theta) {
  using namespace wheel_idx;
  VectorXd x = VectorXd::Zero(kDim);
  x[kTheta] = theta;
  // Drop the hub so the lowest spoke sits at the static penetration depth.
  double lowest = 1.0;
  for (int i = 0; i < WheelParams::kSpokes; ++i) {
    lowest = std::min(
        lowest, std::sin(theta + WheelParams::kPhase + i * WheelParams::kSpacing));
  }
  x[kY] = ex.cp.floor_y - wheel_static_penetration(ex.wp, ex.cp) -
          ex.wp.spoke_length * lowest;
  return x;
}

VectorXd wheel_trial_start(const WheelExperiment& ex, std::uint64_t seed) {
  using namespace wheel_idx;
  std::mt19937_64 rng(seed);
  auto unif = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  if (seed % 3 == 0) {
    // the unfavorable zero-momentum stance start, lightly perturbed
    return wheel_rest_state(ex, -M_PI / 6.0 + unif(-0.02, 0.02));
  }
  // initialized along the reference: forward rolling speed
  VectorXd x = wheel_rest_state(ex, unif(-M_PI / 6.0, M_PI / 6.0));
  x[kXd] = ex.ref_speed * unif(0.6, 1.1);
  x[kThetad] = -x[kXd] / ex.wp.spoke_length;
  return x;
}

// ---------------------------------------------------------------------------
// Pusher-slider
// ---------------------------------------------------------------------------

PlantSchema pusher_schema() {
  using namespace pusher_idx;
  PlantSchema s;
  s.id = "pusher-slider";
  s.state_dim = kDim;
  s.input_dim = 2;
  s.actuator_idx = {kPx, kPy};
  // The actuator enters relative to the slider. Contact is translation
  // invariant, so an absolute pusher position carries no information about
  // the lifted flow and the actuator-to-observable coupling degenerates;
  // the relative coordinate is the one the observables actually respond to.
  s.actuator_offset_idx = {kX, kY};
  // Slider x, y are deliberately left out of the lifted state: the slider's
  // velocity response does not depend on where it is, and the controller
  // recovers position predictions by integrating the velocity rows.
  s.plant_idx = {kTheta, kXd, kYd, kThetad};
  s.rbf_features.push_back(Feature::diff(kPx, kX));
  s.rbf_features.push_back(Feature::diff(kPy, kY));
  s.rbf_features.push_back(Feature::sine(kTheta));
  s.rbf_features.push_back(Feature::cosine(kTheta));
  s.rbf_features.push_back(Feature::linear(kXd));
  s.rbf_features.push_back(Feature::linear(kYd));
  s.rbf_features.push_back(Feature::linear(kThetad));
  s.state_names = {"x_p", "y_p", "x", "y", "theta", "xd", "yd", "thetad"};
  return s;
}

PusherExperiment pusher_experiment_from_config(const Config& cfg, SliderShape shape) {
  PusherExperiment ex;
  ex.sp.shape = shape;
  ex.sp.mass = cfg.number("slider.mass", ex.sp.mass);
  ex.sp.inertia = cfg.number("slider.inertia", ex.sp.inertia);
  ex.sp.damping_t = cfg.number("slider.damping_t", ex.sp.damping_t);
  ex.sp.damping_r = cfg.number("slider.damping_r", ex.sp.damping_r);
  ex.sp.k_contact = cfg.number("slider.k_contact", ex.sp.k_contact);
  ex.sp.c_contact = cfg.number("slider.c_contact", ex.sp.c_contact);
  ex.sp.side = cfg.number("slider.side", ex.sp.side);
  ex.sp.radius = cfg.number("slider.radius", ex.sp.radius);
  ex.sim_step = cfg.number("sim.step", ex.sim_step);
  ex.control_period = cfg.number("mpc.period", ex.control_period);
  ex.horizon = static_cast<int>(cfg.integer("mpc.horizon", ex.horizon));
  ex.speed_limit = cfg.number("mpc.speed_limit", ex.speed_limit);
  ex.n_rbf = static_cast<int>(cfg.integer("dictionary.n_rbf", ex.n_rbf));
  ex.width_scale = cfg.number("dictionary.width_scale", ex.width_scale);
  ex.data_traj = static_cast<int>(cfg.integer("data.n_traj", ex.data_traj));
  ex.data_duration = cfg.number("data.duration", ex.data_duration);
  ex.ridge_scale = cfg.number("fit.ridge_scale", ex.ridge_scale);
  ex.w_pos = cfg.number("mpc.w_pos", ex.w_pos);
  ex.w_vel = cfg.number("mpc.w_vel", ex.w_vel);
  ex.w_r = cfg.number("mpc.w_r", ex.w_r);
  ex.seed = static_cast<std::uint64_t>(cfg.integer("seed", ex.seed));
  return ex;
}

ExcitationPolicy pusher_excitation(const PusherExperiment& ex) {
  ExcitationPolicy pol;
  pol.initial_state = [ex](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unif = [&rng](double lo, double hi) {
      return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    using namespace pusher_idx;
    VectorXd x = VectorXd::Zero(kDim);
    x[kX] = unif(-0.05, 0.05);
    x[kY] = unif(-0.05, 0.05);
    x[kTheta] = unif(-M_PI, M_PI);
    x[kXd] = unif(-0.05, 0.05);
    x[kYd] = unif(-0.05, 0.05);
    x[kThetad] = unif(-0.5, 0.5);
    const double reach = (ex.sp.shape == SliderShape::Square) ? ex.sp.side : ex.sp.radius;
    const double r = reach + unif(-0.01, 0.06);
    const double a = unif(0.0, 2.0 * M_PI);
    x[kPx] = x[kX] + r * std::cos(a);
    x[kPy] = x[kY] + r * std::sin(a);
    return x;
  };
  pol.make_controller = [ex](std::uint64_t seed) -> Controller {
    // Episode-based excitation, balanced between approaching and retreating.
    // A policy that mostly seeks the slider leaks into the autonomous fit:
    // near-contact configurations become predictive of contact regardless of
    // input, and the fitted flow "pushes" the slider on its own.
    struct St {
      std::mt19937_64 rng;
      double until = -1.0;
      int mode = 0;
      Eigen::Vector2d drift = Eigen::Vector2d::Zero();
    };
    auto st = std::make_shared<St>();
    st->rng.seed(seed ^ 0xda942042e4dd58b5ull);
    const double lim = ex.speed_limit;
    return [st, lim](const VectorXd& x, double t) {
      using namespace pusher_idx;
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (t >= st->until) {
        st->until = t + 0.2 + 0.3 * coin(st->rng);
        const double c = coin(st->rng);
        // Freeze episodes matter as much as pushes: without them every
        // near-contact snapshot precedes a push and the autonomous fit
        // hallucinates slider motion from proximity alone.
        st->mode = (c < 0.3) ? 0 : (c < 0.55 ? 1 : (c < 0.75 ? 2 : 3));
        st->drift = lim * Eigen::Vector2d(unif(st->rng), unif(st->rng));
        if (st->mode == 3) st->drift.setZero();
      }
      Eigen::Vector2d u = st->drift;
      if (st->mode == 1 || st->mode == 2) {
        Eigen::Vector2d to_slider(x[kX] - x[kPx], x[kY] - x[kPy]);
        if (to_slider.norm() > 1e-9) to_slider.normalize();
        const double sign = (st->mode == 1) ? 1.0 : -1.0;
        u = lim * (0.8 * sign * to_slider + 0.35 * Eigen::Vector2d(unif(st->rng), unif(st->rng)));
      }
      return VectorXd(u.cwiseMax(-lim).cwiseMin(lim));
    };
  };
  return pol;
}

PusherRig build_pusher_rig(const PusherExperiment& ex) {
  PusherRig rig;
  rig.ex = ex;
  rig.dyn = make_pusher_dynamics(ex.sp);
  const ExcitationPolicy pol = pusher_excitation(ex);
  rig.dict = build_dictionary_from_pilot(rig.dyn, pol, pusher_schema(), ex.n_rbf,
                                         ex.width_scale, ex.control_period,
                                         ex.sim_step, ex.seed);
  DatasetOptions dopt;
  dopt.n_traj = ex.data_traj;
  dopt.duration = ex.data_duration;
  dopt.dt = ex.control_period;
  dopt.sim_step = ex.sim_step;
  dopt.seed = ex.seed + 500;
  const auto modes = [ex](const VectorXd& x) { return pusher_contact_count(x, ex.sp); };
  rig.dataset = robust_dataset(rig.dyn, pol, rig.dict, modes, dopt);

  ActuatorSpec spec;
  spec.kind = ActuatorSpec::Kind::VelocityIntegrator;
  spec.channels = 2;
  rig.B_p = build_Bp(spec, ex.control_period);

  const double ridge = ex.ridge_scale * default_ridge(rig.dataset.z0);
  rig.cck.A = fit_A_autonomous(rig.dataset, rig.dict, rig.B_p, ridge, &rig.fit_report);
  rig.cck.B_p = rig.B_p;
  rig.cck.B_g = build_Bg(rig.cck.A, rig.B_p);
  rig.cck.dict = rig.dict;
  rig.cck.dt = ex.control_period;

  rig.cck_joint.dict = rig.dict;
  rig.cck_joint.dt = ex.control_period;
  rig.cck_joint.B_p = rig.B_p;
  fit_joint(rig.dataset, rig.B_p, ridge, rig.cck_joint.A, rig.cck_joint.B_g);
  return rig;
}

Trajectory run_pusher_closed_loop(const PusherRig& rig, const PusherTask& task) {
  using namespace pusher_idx;
  const PusherExperiment& ex = rig.ex;
  MpcConfig cfg;
  cfg.horizon = ex.horizon;
  cfg.dt = ex.control_period;
  const int nz = rig.dict.lifted_dim();
  cfg.q_weights = VectorXd::Zero(nz);
  // z layout: [p_rel_x, p_rel_y, theta, xd, yd, thetad, rbf...]
  cfg.q_weights[0] = task.w_act;
  cfg.q_weights[1] = task.w_act;
  cfg.q_weights[3] = task.w_vel;
  cfg.q_weights[4] = task.w_vel;
  cfg.r_weights = VectorXd::Constant(2, task.w_r);
  cfg.u_min = VectorXd::Constant(2, -ex.speed_limit);
  cfg.u_max = VectorXd::Constant(2, ex.speed_limit);
  cfg.integrated = {{3, task.w_pos}, {4, task.w_pos}};
  cfg.qp.eps = 1e-6;
  cfg.qp.max_iterations = 2000;

  auto ctrl = std::make_shared<MpcController>(rig.cck, cfg);
  auto hooks = std::make_shared<ClosedLoopHooks>();
  const Dictionary dict = rig.dict;
  const int N = cfg.horizon;
  const Eigen::Vector2d goal = task.goal;
  const double reach =
      (ex.sp.shape == SliderShape::Square) ? 0.5 * ex.sp.side : ex.sp.radius;

  // The reference places the pusher on the side of the slider opposite the
  // goal (pressing in while far from it) and routes around at a standoff
  // radius when the pusher starts on the wrong side. How aggressively the
  // reference is tracked -- gentle sustained pushes vs striking shoves -- is
  // left entirely to the Q/R weights.
  Controller controller = [ctrl, dict, goal, N, hooks, reach,
                           ex](const VectorXd& x, double) {
    const Eigen::Vector2d sl(x[kX], x[kY]);
    const Eigen::Vector2d to_goal = goal - sl;
    const double dist = to_goal.norm();
    const Eigen::Vector2d d = dist > 1e-9 ? Eigen::Vector2d(to_goal / dist)
                                          : Eigen::Vector2d(1.0, 0.0);
    const Eigen::Vector2d p_rel(x[kPx] - x[kX], x[kPy] - x[kY]);
    const double ang = std::atan2(p_rel[1], p_rel[0]);
    const double target_ang = std::atan2(-d[1], -d[0]);
    const double ang_err = std::remainder(target_ang - ang, 2.0 * M_PI);

    const double standoff = 0.035;  // clears the square's corner radius
    const double press_max = 0.02;
    const double hold_band = 0.008;
    // Coast-aware press law: after contact breaks the slider free-rolls about
    // v * tau further, and the square can only be pushed on one face, so
    // overshooting the goal is unrecoverable. Press while the predicted stop
    // point is short of the goal, retreat once it would pass it.
    const double tau = ex.sp.mass / ex.sp.damping_t;
    const double vs = Eigen::Vector2d(x[kXd], x[kYd]).dot(d);
    const double stop_gap = dist - vs * tau;  // where the coast ends vs goal

    Eigen::Vector2d p_ref;
    Eigen::Vector2d v_ref = Eigen::Vector2d::Zero();
    if (dist < hold_band) {
      // On target: back straight off the surface and stop pushing.
      p_ref = (reach + standoff) * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    } else if (std::abs(ang_err) > 0.5) {
      // Wrong side: swing around the slider without touching it.
      const double a = ang + std::clamp(ang_err, -0.7, 0.7);
      p_ref = (reach + standoff) * Eigen::Vector2d(std::cos(a), std::sin(a));
    } else {
      // Speed schedule kept below the coast-safe level (dist / tau), so a
      // gentle, contact-maintained approach can ride the face all the way to
      // the goal. The stop-gap term is a safety override for hard strikes;
      // the extra vs lead compensates servo lag on retreat decisions.
      const double v_des = std::min(0.2, 0.8 * dist);
      const double press_cmd = std::min(
          (v_des - vs) / 0.1, (stop_gap - 0.004 - 0.5 * vs) / 0.05);
      double press =
          press_max * std::clamp(press_cmd, -standoff / press_max, 1.0);
      // Grow the press target from the measured penetration so first contact
      // ramps the force instead of striking from free flight.
      press = std::min(press, push_penetration(x, ex.sp) + 0.002);
      // Cap the approach step so free flight ends in a soft touch rather
      // than a strike (aggressive weights still saturate the input box).
      const double r_t = std::max(reach - press, p_rel.norm() - 0.012);
      p_ref = -r_t * d;
      v_ref = v_des * d;
    }

    VectorXd ref_state = x;
    ref_state[kPx] = sl[0] + p_ref[0];
    ref_state[kPy] = sl[1] + p_ref[1];
    ref_state[kXd] = v_ref[0];
    ref_state[kYd] = v_ref[1];
    ref_state[kThetad] = 0.0;
    const VectorXd z_goal = dict.lift(ref_state);
    MatrixXd z_ref = z_goal.replicate(1, N + 1);
    VectorXd s0(2);
    s0 << x[kX], x[kY];
    MatrixXd s_ref(2, N + 1);
    s_ref.row(0).setConstant(goal[0]);
    s_ref.row(1).setConstant(goal[1]);
    MpcDiagnostics diag;
    const VectorXd u = ctrl->step(x, z_ref, s0, s_ref, &diag);
    hooks->last_ms = diag.solve_ms;
    return u;
  };

  const ContinuousDynamics true_dyn = make_pusher_dynamics(task.true_params);
  SimulateOptions opt;
  opt.duration = task.duration;
  opt.step = ex.sim_step;
  opt.control_period = ex.control_period;
  opt.record_stride = std::lround(ex.control_period / ex.sim_step);
  const SliderParams true_sp = task.true_params;
  opt.contact_counter = [true_sp](const VectorXd& x) {
    return pusher_contact_count(x, true_sp);
  };
  opt.solver_timer = [hooks]() { return hooks->last_ms; };
  return simulate(true_dyn, task.x0, controller, opt);
}

PushTraceStats analyze_push_trace(const Trajectory& traj, const Eigen::Vector2d& goal,
                                  double band, double dt) {
  using namespace pusher_idx;
  PushTraceStats st;
  const std::size_t n = traj.states.size();
  std::vector<double> dist(n);
  for (std::size_t k = 0; k < n; ++k) {
    dist[k] = (Eigen::Vector2d(traj.states[k][kX], traj.states[k][kY]) - goal).norm();
  }
  st.final_distance = dist.back();
  st.stays_in_band = dist.back() <= band;

  std::size_t band_entry = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (dist[k] <= band) {
      band_entry = k;
      st.time_to_goal_band = traj.times[k];
      break;
    }
  }

  auto in_contact = [&](std::size_t k) {
    return k < traj.contact_counts.size() && traj.contact_counts[k] > 0;
  };

  // Contact episodes over the whole run (gaps shorter than 2 steps merge).
  int episodes = 0;
  bool inside = false;
  int gap = 100;
  for (std::size_t k = 0; k < n; ++k) {
    if (in_contact(k)) {
      if (!inside && gap >= 2) ++episodes;
      inside = true;
      gap = 0;
    } else {
      ++gap;
      if (gap >= 2) inside = false;
    }
  }
  st.contact_episodes = episodes;

  // Approach phase: first contact to band entry.
  std::size_t first_contact = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (in_contact(k)) {
      first_contact = k;
      break;
    }
  }
  if (first_contact < band_entry) {
    long contact_steps = 0, total = 0;
    std::size_t run_start = 0;
    bool in_gap = false;
    for (std::size_t k = first_contact; k < std::min(band_entry, n); ++k) {
      ++total;
      if (in_contact(k)) {
        if (in_gap) {
          // gap closed: did the slider approach during it?
          if (dist[k] < dist[run_start] - 1e-3) {
            st.longest_contact_gap =
                std::max(st.longest_contact_gap, (k - run_start) * dt);
          }
          in_gap = false;
        }
        ++contact_steps;
      } else if (!in_gap) {
        in_gap = true;
        run_start = k;
      }
    }
    if (in_gap && band_entry <= n && band_entry > run_start) {
      const std::size_t end = std::min(band_entry, n - 1);
      if (dist[end] < dist[run_start] - 1e-3) {
        st.longest_contact_gap = std::max(st.longest_contact_gap, (end - run_start) * dt);
      }
    }
    if (total > 0) {
      st.contact_fraction = static_cast<double>(contact_steps) / static_cast<double>(total);
    }
  }

  // Adverse displacement before first sustained contact (repositioning runs).
  std::size_t sustained = n;
  int consecutive = 0;
  for (std::size_t k = 0; k < n; ++k) {
    consecutive = in_contact(k) ? consecutive + 1 : 0;
    if (consecutive * dt >= 0.2) {
      sustained = k + 1 - consecutive;
      break;
    }
  }
  for (std::size_t k = 0; k < std::min(sustained, n); ++k) {
    st.adverse_displacement = std::max(st.adverse_displacement, dist[k] - dist[0]);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Study drivers
// ---------------------------------------------------------------------------

namespace {

nlohmann::json aggregate(const std::vector<TrialMetrics>& trials) {
  nlohmann::json j;
  j["trials"] = nlohmann::json::array();
  double disp = 0.0, omega = 0.0, effort = 0.0;
  int ok = 0;
  for (const auto& t : trials) {
    j["trials"].push_back(to_json(t));
    if (t.success) {
      disp += t.max_x_displacement;
      omega += t.avg_abs_angular_velocity;
      effort += t.control_effort;
      ++ok;
    }
  }
  const double n = std::max(1, ok);
  j["mean_max_x_displacement"] = disp / n;
  j["mean_avg_abs_angular_velocity"] = omega / n;
  j["mean_control_effort"] = effort / n;
  j["successful_trials"] = ok;
  return j;
}

}  // namespace

MetricsReport run_wheel_ablation(const Config& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const WheelExperiment ex = wheel_experiment_from_config(cfg);
  WheelRig rig = build_wheel_rig(ex);

  std::vector<std::string> methods = {"cck-analytic", "cck-no-compensation",
                                      "local-linearization", "dmdc"};
  if (cfg.has("ablation.methods")) {
    methods.clear();
    for (const auto& m :
         std::get<std::vector<std::string>>(cfg.entries().at("ablation.methods"))) {
      methods.push_back(m);
    }
  }
  const int n_trials = static_cast<int>(cfg.integer("ablation.trials", 10));
  const double duration = cfg.number("ablation.duration", 20.0);
  const bool halved = cfg.boolean("ablation.horizon_ablation", false);

  MetricsReport report;
  report.experiment = "wheel-ablation";
  report.config_hash = cfg.hash();
  report.seed = ex.seed;
  for (const auto& name : methods) {
    const FitMethod method = fit_method_from_string(name);
    std::vector<TrialMetrics> trials;
    for (int tr = 0; tr < n_trials; ++tr) {
      TrialMetrics m;
      try {
        const VectorXd x0 = wheel_trial_start(ex, ex.seed * 7919 + tr);
        Trajectory traj = run_wheel_closed_loop(rig, method, x0, duration);
        m = compute_metrics(traj, wheel_idx::kX, wheel_idx::kThetad, ex.control_period);
        write_trace_csv(out_dir + "/" + name + "_trial" + std::to_string(tr) + ".csv",
                        traj, wheel_schema().state_names, 6);
      } catch (const std::exception& e) {
        m.success = false;
        m.note = e.what();
        report.exit_code = 2;
      }
      trials.push_back(m);
    }
    report.data[name] = aggregate(trials);
  }
  if (halved) {
    std::vector<TrialMetrics> trials;
    for (int tr = 0; tr < n_trials; ++tr) {
      TrialMetrics m;
      try {
        const VectorXd x0 = wheel_trial_start(ex, ex.seed * 7919 + tr);
        Trajectory traj = run_wheel_closed_loop(rig, FitMethod::CckAnalytic, x0,
                                                duration, ex.horizon / 2);
        m = compute_metrics(traj, wheel_idx::kX, wheel_idx::kThetad, ex.control_period);
      } catch (const std::exception& e) {
        m.success = false;
        m.note = e.what();
        report.exit_code = 2;
      }
      trials.push_back(m);
    }
    report.data["cck-analytic-half-horizon"] = aggregate(trials);
  }
  write_report(out_dir + "/ablation_report.json", report);
  return report;
}

namespace {

PusherTask default_push_task(const PusherRig& rig) {
  using namespace pusher_idx;
  PusherTask task;
  task.true_params = rig.ex.sp;
  task.x0 = VectorXd::Zero(kDim);
  task.goal << 0.3, 0.0;
  const double reach =
      (rig.ex.sp.shape == SliderShape::Square) ? rig.ex.sp.side * 0.5 : rig.ex.sp.radius;
  task.x0[kPx] = -(reach + 0.03);
  task.x0[kPy] = 0.0;
  return task;
}

}  // namespace

MetricsReport run_pusher_suite(const Config& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  using namespace pusher_idx;

  MetricsReport report;
  report.experiment = "pusher-suite";
  report.config_hash = cfg.hash();

  const PusherExperiment sq = pusher_experiment_from_config(cfg, SliderShape::Square);
  PusherRig rig_sq = build_pusher_rig(sq);
  report.seed = sq.seed;
  const double band = cfg.number("pusher.goal_band", 0.01);
  const double dt = sq.control_period;

  auto run_and_record = [&](const std::string& name, const PusherRig& rig,
                            const PusherTask& task, double analysis_band) {
    try {
      Trajectory traj = run_pusher_closed_loop(rig, task);
      const PushTraceStats st = analyze_push_trace(traj, task.goal, analysis_band, dt);
      write_trace_csv(out_dir + "/" + name + ".csv", traj, pusher_schema().state_names, 2);
      nlohmann::json j;
      j["time_to_goal_band"] = st.time_to_goal_band;
      j["stays_in_band"] = st.stays_in_band;
      j["longest_contact_gap"] = st.longest_contact_gap;
      j["contact_fraction"] = st.contact_fraction;
      j["contact_episodes"] = st.contact_episodes;
      j["final_distance"] = st.final_distance;
      j["adverse_displacement"] = st.adverse_displacement;
      j["classified"] = (st.longest_contact_gap >= 0.3) ? "shove" : "push";
      report.data[name] = j;
    } catch (const std::exception& e) {
      report.data[name] = {{"error", e.what()}};
      report.exit_code = 2;
    }
  };

  // push vs shove: same model and reference, weights only
  PusherTask push = default_push_task(rig_sq);
  push.w_act = cfg.number("push.w_act", 30.0);
  push.w_r = cfg.number("push.w_r", 20.0);
  push.duration = cfg.number("push.duration", 20.0);
  run_and_record("push", rig_sq, push, band);

  PusherTask shove = default_push_task(rig_sq);
  shove.w_act = cfg.number("shove.w_act", 400.0);
  shove.w_r = cfg.number("shove.w_r", 0.05);
  shove.duration = cfg.number("shove.duration", 20.0);
  run_and_record("shove", rig_sq, shove, band);

  // repositioning around the circular slider
  const PusherExperiment ci = pusher_experiment_from_config(cfg, SliderShape::Circle);
  PusherRig rig_ci = build_pusher_rig(ci);
  PusherTask repos = default_push_task(rig_ci);
  repos.x0[kPx] = ci.sp.radius + 0.03;  // wrong (goal) side
  repos.w_act = cfg.number("reposition.w_act", 100.0);
  repos.w_r = cfg.number("reposition.w_r", 1.0);
  repos.duration = cfg.number("reposition.duration", 15.0);
  run_and_record("reposition", rig_ci, repos, 0.03);

  // model mismatch: true floor friction at half the modeled value
  PusherTask dribble = default_push_task(rig_ci);
  dribble.true_params.damping_t = 0.5 * ci.sp.damping_t;
  dribble.true_params.damping_r = 0.5 * ci.sp.damping_r;
  dribble.w_act = cfg.number("dribble.w_act", 100.0);
  dribble.w_r = cfg.number("dribble.w_r", 1.0);
  dribble.duration = cfg.number("dribble.duration", 15.0);
  run_and_record("low-friction-dribble", rig_ci, dribble, 0.03);

  write_report(out_dir + "/pusher_report.json", report);
  return report;
}

MetricsReport run_benchmark(const Config& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  MetricsReport report;
  report.experiment = "benchmark";
  report.config_hash = cfg.hash();

  for (const SliderShape shape : {SliderShape::Square, SliderShape::Circle}) {
    const std::string name = (shape == SliderShape::Square) ? "square" : "circle";
    const PusherExperiment ex = pusher_experiment_from_config(cfg, shape);
    report.seed = ex.seed;
    PusherRig rig = build_pusher_rig(ex);
    PusherTask task = default_push_task(rig);
    task.duration = std::max(12.0, 101 * ex.control_period);
    Trajectory traj = run_pusher_closed_loop(rig, task);

    std::vector<double> solves;
    for (double s : traj.solver_ms) {
      if (s > 0.0) solves.push_back(s);
    }
    const TrialMetrics m =
        compute_metrics(traj, pusher_idx::kX, pusher_idx::kThetad, ex.control_period);
    nlohmann::json hist = nlohmann::json::array();
    std::vector<long> bins(20, 0);
    for (double s : solves) {
      bins[std::min<std::size_t>(19, static_cast<std::size_t>(s / 0.5))]++;
    }
    for (std::size_t b = 0; b < bins.size(); ++b) {
      hist.push_back({{"ms_lo", 0.5 * b}, {"ms_hi", 0.5 * (b + 1)}, {"count", bins[b]}});
    }
    report.data[name] = {{"iterations", solves.size()},
                         {"mean_ms", m.mean_solve_ms},
                         {"p99_ms", m.p99_solve_ms},
                         {"histogram", hist}};
  }
  write_report(out_dir + "/benchmark_report.json", report);
  return report;
}

MetricsReport run_stiffness_sweep(const Config& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  MetricsReport report;
  report.experiment = "stiffness-sweep";
  report.config_hash = cfg.hash();

  std::vector<double> grid = cfg.numbers("sweep.k_c", {100, 316, 1000, 3162, 10000});
  report.data["points"] = nlohmann::json::array();
  for (double k_c : grid) {
    nlohmann::json point;
    point["k_c"] = k_c;
    try {
      PusherExperiment ex = pusher_experiment_from_config(cfg, SliderShape::Square);
      ex.sp.k_contact = k_c;
      report.seed = ex.seed;
      PusherRig rig = build_pusher_rig(ex);

      // Multi-step prediction RMSE on a held-out rollout.
      const ExcitationPolicy pol = pusher_excitation(ex);
      DatasetOptions dopt;
      dopt.n_traj = 5;
      dopt.duration = 4.0;
      dopt.dt = ex.control_period;
      dopt.sim_step = ex.sim_step;
      dopt.seed = ex.seed + 99991;
      const auto modes = [ex](const VectorXd& x) {
        return pusher_contact_count(x, ex.sp);
      };
      const SnapshotDataset held =
          robust_dataset(rig.dyn, pol, rig.dict, modes, dopt);
      const int H = 10;
      double err = 0.0;
      long count = 0;
      const MatrixXd B = rig.cck.B();
      for (long s = 0; s + H < held.count(); s += H) {
        if (held.traj_index[s] != held.traj_index[s + H]) continue;
        VectorXd z = held.z0.col(s);
        for (int j = 0; j < H; ++j) z = rig.cck.A * z + B * held.u.col(s + j);
        err += (z.head(6) - held.z0.col(s + H).head(6)).squaredNorm();
        ++count;
      }
      point["prediction_rmse"] = std::sqrt(err / std::max(1l, count));

      PusherTask task = default_push_task(rig);
      task.w_pos = 20.0;
      task.w_r = 2.0;
      Trajectory traj = run_pusher_closed_loop(rig, task);
      double cost = 0.0;
      for (const auto& x : traj.states) {
        cost += (Eigen::Vector2d(x[pusher_idx::kX], x[pusher_idx::kY]) - task.goal)
                    .squaredNorm() *
                ex.control_period;
      }
      point["tracking_cost"] = cost;
    } catch (const std::exception& e) {
      point["error"] = e.what();
      report.exit_code = 2;
    }
    report.data["points"].push_back(point);
  }
  write_report(out_dir + "/stiffness_report.json", report);
  return report;
}

}  // namespace cck

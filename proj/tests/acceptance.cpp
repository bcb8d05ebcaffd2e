// Toolkit-level acceptance harness. Runs ten end-to-end checks with pinned
// tolerances and prints one PASS/FAIL line per check; exits nonzero if any
// check fails. Heavy fixtures (identification datasets and fitted models)
// are built once and shared.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "cck/experiments.hpp"

using namespace cck;

namespace {

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int g_failures = 0;

void verdict(const std::string& name, bool pass, const std::string& detail,
             double seconds) {
  std::printf("%-4s %-34s %s (%.1f s)\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double rel_frobenius(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

// ---------------------------------------------------------------------------
// 1. analytic compensation identity and joint-fit agreement
// ---------------------------------------------------------------------------
void check_compensation_identity(const WheelRig& wheel, const PusherRig& pusher) {
  Clock clk;
  const auto identity_err = [](const CckModel& m) {
    const MatrixXd rhs = m.A_gp() * m.A_pp().inverse() * m.B_p;
    return rel_frobenius(m.B_g, rhs);
  };
  const double e_wheel = identity_err(wheel.cck);
  const double e_pusher = identity_err(pusher.cck);
  const double joint_gap = rel_frobenius(wheel.cck_joint.B_g, wheel.cck.B_g);
  const bool pass = e_wheel <= 1e-10 && e_pusher <= 1e-10 && joint_gap <= 0.10;
  verdict("compensation-identity", pass,
          fmt("wheel %.1e, pusher %.1e (tol 1e-10); joint gap %.1f%% (tol 10%%)",
              e_wheel, e_pusher, 100.0 * joint_gap),
          clk.seconds());
}

// ---------------------------------------------------------------------------
// 2. exact recovery of a synthetic 30-dim linear system
// ---------------------------------------------------------------------------
void check_synthetic_recovery() {
  Clock clk;
  const int n = 30, m = 4, r = 3;
  const long samples = 5000;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto randn = [&](long rows, long cols) {
    MatrixXd M(rows, cols);
    for (long i = 0; i < rows; ++i)
      for (long j = 0; j < cols; ++j) M(i, j) = gauss(rng);
    return M;
  };
  MatrixXd A = randn(n, n);
  A *= 0.9 / std::abs(A.eigenvalues().cwiseAbs().maxCoeff());
  A.topLeftCorner(m, m) += MatrixXd::Identity(m, m);
  const MatrixXd B_p = randn(m, r);
  const MatrixXd B_g =
      A.bottomLeftCorner(n - m, m) * A.topLeftCorner(m, m).inverse() * B_p;

  PlantSchema schema;
  schema.id = "synthetic";
  schema.state_dim = n;
  schema.input_dim = r;
  for (int i = 0; i < m; ++i) schema.actuator_idx.push_back(i);
  for (int i = m; i < n; ++i) schema.plant_idx.push_back(i);
  for (int i = 0; i < n; ++i) schema.state_names.push_back("z" + std::to_string(i));
  const Dictionary dict = make_rbf_dictionary(schema, MatrixXd(), VectorXd(), true);

  auto make_ds = [&](bool input_in_plant) {
    SnapshotDataset ds;
    ds.plant_id = "synthetic";
    ds.dt = 0.01;
    ds.dict_hash = dict.hash();
    ds.x0 = randn(n, samples);
    ds.u = randn(r, samples);
    MatrixXd B(n, r);
    B << B_p, (input_in_plant ? B_g : MatrixXd::Zero(n - m, r));
    ds.x1 = A * ds.x0 + B * ds.u;
    ds.z0 = ds.x0;
    ds.z1 = ds.x1;
    ds.traj_index.assign(samples, 0);
    ds.empty_flag = false;
    return ds;
  };

  // The autonomous estimator is consistent when the embedding rows carry no
  // direct input effect (the identity embedding gives the re-lift step
  // nothing to correct); the joint and DMDc estimators see the full channel.
  const SnapshotDataset ds_auto = make_ds(false);
  const SnapshotDataset ds_full = make_ds(true);

  const MatrixXd A_auto = fit_A_autonomous(ds_auto, dict, B_p, 1e-12, nullptr);
  const double e_auto = (A_auto - A).cwiseAbs().maxCoeff();

  MatrixXd A_joint, Bg_joint;
  fit_joint(ds_full, B_p, 1e-12, A_joint, Bg_joint);
  const double e_joint = std::max((A_joint - A).cwiseAbs().maxCoeff(),
                                  (Bg_joint - B_g).cwiseAbs().maxCoeff());

  const LinearModel dmdc = fit_dmdc(ds_full, 1e-12, nullptr);
  MatrixXd B(n, r);
  B << B_p, B_g;
  const double e_dmdc = std::max((dmdc.A - A).cwiseAbs().maxCoeff(),
                                 (dmdc.B - B).cwiseAbs().maxCoeff());

  const bool pass = e_auto < 1e-8 && e_joint < 1e-8 && e_dmdc < 1e-8;
  verdict("synthetic-recovery", pass,
          fmt("max elementwise error: autonomous %.1e, joint %.1e, dmdc %.1e (tol 1e-8)",
              e_auto, e_joint, e_dmdc),
          clk.seconds());
}

// ---------------------------------------------------------------------------
// 3. held-out prediction across contact-mode boundaries, CCK vs local lin.
// ---------------------------------------------------------------------------
void check_boundary_prediction(const WheelRig& rig) {
  Clock clk;
  const WheelExperiment& ex = rig.ex;
  const ExcitationPolicy pol = wheel_excitation(ex);
  DatasetOptions dopt;
  dopt.n_traj = 40;
  dopt.duration = 4.0;
  dopt.dt = ex.control_period;
  dopt.sim_step = ex.sim_step;
  dopt.seed = ex.seed + 424243;
  const auto modes = [&](const VectorXd& x) {
    return wheel_contact_count(x, ex.wp, ex.cp);
  };
  const SnapshotDataset held = generate_dataset(rig.dyn, pol, rig.dict, modes, dopt);

  const int H = 20;
  const MatrixXd B = rig.cck.B();
  int wins = 0, total = 0;
  for (long s = 0; s + H < held.count() && total < 50; s += 37) {
    if (held.traj_index[s] != held.traj_index[s + H]) continue;
    const int m0 = wheel_contact_count(held.x0.col(s), ex.wp, ex.cp);
    bool crosses = false;
    for (int j = 1; j <= H && !crosses; ++j) {
      crosses = wheel_contact_count(held.x0.col(s + j), ex.wp, ex.cp) != m0;
    }
    if (!crosses) continue;
    double cck_err = 0.0, ll_err = 0.0;
    VectorXd z = held.z0.col(s);
    for (int j = 0; j < H; ++j) {
      z = rig.cck.A * z + B * held.u.col(s + j);
      cck_err += (z.segment(12, 6) - held.z0.col(s + j + 1).segment(12, 6)).squaredNorm();
    }
    const LinearModel lm = local_linearize(rig.dyn, held.x0.col(s), held.u.col(s),
                                           ex.control_period, ex.sim_step);
    VectorXd x = held.x0.col(s);
    for (int j = 0; j < H; ++j) {
      x = lm.A * x + lm.B * held.u.col(s + j) + lm.c;
      VectorXd g(6);
      g << x[wheel_idx::kX], x[wheel_idx::kY], x[wheel_idx::kTheta],
          x[wheel_idx::kXd], x[wheel_idx::kYd], x[wheel_idx::kThetad];
      ll_err += (g - held.z0.col(s + j + 1).segment(12, 6)).squaredNorm();
    }
    ++total;
    if (cck_err < ll_err) ++wins;
  }
  const double frac = 100.0 * wins / std::max(1, total);
  const bool pass = total >= 50 && wins >= (4 * total + 4) / 5 && clk.seconds() < 300.0;
  verdict("boundary-prediction", pass,
          fmt("CCK beats local linearization on %d/%d segments (%.0f%%, need 80%%)",
              wins, total, frac),
          clk.seconds());
}

// ---------------------------------------------------------------------------
// 4. wheel model-class ablation
// ---------------------------------------------------------------------------
void check_wheel_ablation(const WheelRig& rig) {
  Clock clk;
  const int n_seeds = 10;
  const double duration = 20.0;
  const FitMethod methods[4] = {FitMethod::CckAnalytic, FitMethod::CckNoCompensation,
                                FitMethod::Dmdc, FitMethod::LocalLinearization};
  double dx[4] = {0, 0, 0, 0}, eff[4] = {0, 0, 0, 0};
  for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
    const VectorXd x0 = wheel_trial_start(rig.ex, seed);
    for (int mi = 0; mi < 4; ++mi) {
      const Trajectory tr = run_wheel_closed_loop(rig, methods[mi], x0, duration);
      double xmax = 0.0, e = 0.0;
      for (const auto& s : tr.states) xmax = std::max(xmax, s[wheel_idx::kX] - x0[wheel_idx::kX]);
      for (const auto& u : tr.inputs) e += u.squaredNorm() * rig.ex.control_period;
      dx[mi] += xmax / n_seeds;
      eff[mi] += e / n_seeds;
    }
  }
  const bool order_ok = dx[0] >= dx[1] && dx[1] > dx[3] && dx[1] > dx[2];
  const bool margin_ok = dx[0] >= 3.0 * dx[3];
  const bool effort_ok = eff[0] <= eff[1];
  const bool pass = order_ok && margin_ok && effort_ok && clk.seconds() < 1800.0;
  verdict("wheel-ablation", pass,
          fmt("mean dx [m]: cck %.1f >= no-comp %.1f > dmdc %.1f, ll %.1f; "
              "effort cck/no-comp %+.1f%%",
              dx[0], dx[1], dx[2], dx[3], 100.0 * (eff[0] - eff[1]) / eff[1]),
          clk.seconds());
  std::printf("     wheel-ablation detail: cck dx %.1f m over %g s trials "
              "(reference report: >15 m); efforts cck %.1f, no-comp %.1f, "
              "dmdc %.1f, ll %.1f\n",
              dx[0], duration, eff[0], eff[1], eff[2], eff[3]);
}

// ---------------------------------------------------------------------------
// 5. rock-and-roll start from rest
// ---------------------------------------------------------------------------
void check_rest_start(const WheelRig& rig) {
  Clock clk;
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double theta = -M_PI / 6.0 + 0.05 * std::sin(1.7 * static_cast<double>(seed));
    const VectorXd x0 = wheel_rest_state(rig.ex, theta);
    const Trajectory tr = run_wheel_closed_loop(rig, FitMethod::CckAnalytic, x0, 10.0);
    int signch = 0;
    double prev = 0.0;
    bool escaped = false;
    for (const auto& s : tr.states) {
      const double w = s[wheel_idx::kThetad];
      if (std::abs(w) > 0.05) {
        if (prev != 0.0 && w * prev < 0.0) ++signch;
        prev = w;
      }
      if (signch >= 2 && s[wheel_idx::kX] - x0[wheel_idx::kX] > 1.0) {
        escaped = true;
        break;
      }
    }
    if (escaped) ++ok;
  }
  const bool pass = ok >= 7 && clk.seconds() < 600.0;
  verdict("rest-start-escape", pass,
          fmt("%d/10 seeds rocked (>=2 reversals) then travelled >1 m in 10 s "
              "(need 7)", ok),
          clk.seconds());
}

// ---------------------------------------------------------------------------
// 6. push vs shove from one model, weights only
// ---------------------------------------------------------------------------
PusherTask square_task(const PusherRig& rig, double w_act, double w_r) {
  PusherTask task;
  task.true_params = rig.ex.sp;
  task.x0 = VectorXd::Zero(pusher_idx::kDim);
  task.x0[pusher_idx::kPx] = -(0.5 * rig.ex.sp.side + 0.03);
  task.goal << 0.3, 0.0;
  task.duration = 20.0;
  task.w_act = w_act;
  task.w_r = w_r;
  return task;
}

void check_push_vs_shove(const PusherRig& rig) {
  Clock clk;
  const double band = 0.01, dt = rig.ex.control_period;
  const Trajectory t_push =
      run_pusher_closed_loop(rig, square_task(rig, 30.0, 20.0));
  const Trajectory t_shove =
      run_pusher_closed_loop(rig, square_task(rig, 400.0, 0.05));
  const PushTraceStats push = analyze_push_trace(t_push, {0.3, 0.0}, band, dt);
  const PushTraceStats shove = analyze_push_trace(t_shove, {0.3, 0.0}, band, dt);
  const bool push_ok = push.stays_in_band && push.longest_contact_gap < 0.3 &&
                       push.contact_fraction >= 0.9;
  const bool shove_ok = shove.stays_in_band && shove.longest_contact_gap >= 0.3;
  const bool faster = shove.time_to_goal_band > 0.0 && push.time_to_goal_band > 0.0 &&
                      shove.time_to_goal_band < push.time_to_goal_band;
  const bool pass = push_ok && shove_ok && faster && clk.seconds() < 300.0;
  verdict("push-vs-shove", pass,
          fmt("push: contact %.0f%%, band at %.1f s; shove: gap %.1f s, band at "
              "%.1f s",
              100.0 * push.contact_fraction, push.time_to_goal_band,
              shove.longest_contact_gap, shove.time_to_goal_band),
          clk.seconds());
}

// ---------------------------------------------------------------------------
// 7. repositioning around the circular slider
// ---------------------------------------------------------------------------
void check_reposition(const PusherRig& rig) {
  Clock clk;
  PusherTask task;
  task.true_params = rig.ex.sp;
  task.x0 = VectorXd::Zero(pusher_idx::kDim);
  task.x0[pusher_idx::kPx] = rig.ex.sp.radius + 0.03;  // on the goal side
  task.goal << 0.3, 0.0;
  task.duration = 15.0;
  task.w_act = 100.0;
  task.w_r = 1.0;
  const Trajectory tr = run_pusher_closed_loop(rig, task);
  const PushTraceStats st = analyze_push_trace(tr, task.goal, 0.03, rig.ex.control_period);
  // the pusher must swing from the goal side of the slider to the pushing side
  bool crossed = false;
  for (const auto& s : tr.states) {
    const Eigen::Vector2d d =
        (task.goal - Eigen::Vector2d(s[pusher_idx::kX], s[pusher_idx::kY])).normalized();
    const Eigen::Vector2d rel(s[pusher_idx::kPx] - s[pusher_idx::kX],
                              s[pusher_idx::kPy] - s[pusher_idx::kY]);
    if (rel.dot(d) < -0.5 * rel.norm()) {
      crossed = true;
      break;
    }
  }
  const bool pass = crossed && st.final_distance < 0.03 &&
                    st.adverse_displacement < 0.01 && clk.seconds() < 300.0;
  verdict("reposition", pass,
          fmt("crossed to pushing side: %s; final distance %.1f mm (tol 30), "
              "adverse %.1f mm (tol 10)",
              crossed ? "yes" : "no", 1e3 * st.final_distance,
              1e3 * st.adverse_displacement),
          clk.seconds());
}

// ---------------------------------------------------------------------------
// 8. dribbling under halved floor damping
// ---------------------------------------------------------------------------
void check_dribble(const PusherRig& rig) {
  Clock clk;
  PusherTask task;
  task.true_params = rig.ex.sp;
  task.true_params.damping_t *= 0.5;
  task.true_params.damping_r *= 0.5;
  task.x0 = VectorXd::Zero(pusher_idx::kDim);
  task.x0[pusher_idx::kPx] = -(rig.ex.sp.radius + 0.03);
  task.goal << 0.3, 0.0;
  task.duration = 15.0;
  task.w_act = 100.0;
  task.w_r = 1.0;
  const Trajectory tr = run_pusher_closed_loop(rig, task);
  const PushTraceStats st = analyze_push_trace(tr, task.goal, 0.03, rig.ex.control_period);
  const bool pass = st.stays_in_band && st.time_to_goal_band > 0.0 &&
                    st.contact_episodes >= 2 && clk.seconds() < 300.0;
  verdict("low-friction-dribble", pass,
          fmt("final distance %.1f mm (band 30), %d contact episodes (need >=2)",
              1e3 * st.final_distance, st.contact_episodes),
          clk.seconds());
}

// ---------------------------------------------------------------------------
// 9. control-step latency
// ---------------------------------------------------------------------------
void check_latency(const PusherRig& rig_sq, const PusherRig& rig_ci) {
  Clock clk;
  bool pass = true;
  std::string detail;
  for (const PusherRig* rig : {&rig_sq, &rig_ci}) {
    PusherTask task;
    task.true_params = rig->ex.sp;
    task.x0 = VectorXd::Zero(pusher_idx::kDim);
    const double reach = (rig->ex.sp.shape == SliderShape::Square)
                             ? 0.5 * rig->ex.sp.side
                             : rig->ex.sp.radius;
    task.x0[pusher_idx::kPx] = -(reach + 0.03);
    task.goal << 0.3, 0.0;
    task.duration = std::max(12.0, 101 * rig->ex.control_period);
    const Trajectory tr = run_pusher_closed_loop(*rig, task);
    std::vector<double> solves;
    for (double s : tr.solver_ms) {
      if (s > 0.0) solves.push_back(s);
    }
    double mean = 0.0;
    for (double s : solves) mean += s;
    mean /= std::max<std::size_t>(1, solves.size());
    long hist[5] = {0, 0, 0, 0, 0};  // <1, <2, <5, <10, >=10 ms
    for (double s : solves) {
      ++hist[s < 1.0 ? 0 : s < 2.0 ? 1 : s < 5.0 ? 2 : s < 10.0 ? 3 : 4];
    }
    const char* name = rig->ex.sp.shape == SliderShape::Square ? "square" : "circle";
    pass = pass && solves.size() >= 100 && mean < 10.0;
    detail += fmt("%s %.2f ms/%zu steps [<1:%ld <2:%ld <5:%ld <10:%ld >=10:%ld] ",
                  name, mean, solves.size(), hist[0], hist[1], hist[2], hist[3],
                  hist[4]);
  }
  verdict("mpc-step-latency", pass, detail + "(tol mean < 10 ms)", clk.seconds());
}

// ---------------------------------------------------------------------------
// 10. property suites
// ---------------------------------------------------------------------------
bool prop_jacobians(std::string& why) {
  WheelParams wp;
  double max_err = 0.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd x(wheel_idx::kDim);
    for (int i = 0; i < wheel_idx::kDim; ++i) x[i] = unif(rng);
    for (int i = 0; i < 6; ++i) x[wheel_idx::kPsi0 + i] = 0.8 * unif(rng);
    for (int i = 0; i < 6; ++i) {
      Eigen::Vector2d tip;
      Eigen::Matrix<double, 2, 9> jac;
      spoke_tip(x, wp, i, tip, jac);
      const int q_idx[9] = {wheel_idx::kX, wheel_idx::kY, wheel_idx::kTheta,
                            wheel_idx::kPsi0, wheel_idx::kPsi0 + 1,
                            wheel_idx::kPsi0 + 2, wheel_idx::kPsi0 + 3,
                            wheel_idx::kPsi0 + 4, wheel_idx::kPsi0 + 5};
      for (int j = 0; j < 9; ++j) {
        VectorXd xp = x, xm = x;
        xp[q_idx[j]] += 1e-6;
        xm[q_idx[j]] -= 1e-6;
        Eigen::Vector2d tp, tm;
        Eigen::Matrix<double, 2, 9> ignore;
        spoke_tip(xp, wp, i, tp, ignore);
        spoke_tip(xm, wp, i, tm, ignore);
        max_err = std::max(max_err, ((tp - tm) / 2e-6 - jac.col(j)).norm());
      }
    }
  }
  why = fmt("tip jacobian max error %.1e (tol 1e-6)", max_err);
  return max_err < 1e-6;
}

bool prop_contact_continuity(std::string& why) {
  WheelContactParams cp;
  SliderParams sp;
  double worst = 0.0;
  for (double d = 1e-9; d < 1e-5; d *= 10.0) {
    worst = std::max(worst, normal_force(d, 0.0, cp));
    Eigen::Vector2d f, c;
    VectorXd x = VectorXd::Zero(pusher_idx::kDim);
    x[pusher_idx::kPx] = -0.5 * sp.side + d;
    push_force(x, sp, f, c);
    worst = std::max(worst, f.norm());
  }
  why = fmt("max force %.1e N at 1e-5 m penetration onset", worst);
  return worst < 0.05 && normal_force(0.0, 0.0, cp) == 0.0;
}

bool prop_dissipativity(std::string& why) {
  WheelParams wp;
  WheelContactParams cp;
  const ContinuousDynamics dyn = make_wheel_dynamics(wp, cp);
  VectorXd x = wheel_two_spoke_stance(wp, cp, 0.0);
  x[wheel_idx::kY] += 0.01;
  x[wheel_idx::kThetad] = 1.0;
  const double e0 = wheel_energy(x, wp);
  const VectorXd u = VectorXd::Zero(6);
  for (int k = 0; k < 40000; ++k) x = integrate_step(dyn, x, u, k * 1e-4, 1e-4);
  const double e1 = wheel_energy(x, wp);

  SliderParams sp;
  const ContinuousDynamics pdyn = make_pusher_dynamics(sp);
  VectorXd y = VectorXd::Zero(pusher_idx::kDim);
  y[pusher_idx::kPx] = -1.0;
  y[pusher_idx::kXd] = 0.3;
  const VectorXd pu = VectorXd::Zero(2);
  for (int k = 0; k < 5000; ++k) y = integrate_step(pdyn, y, pu, k * 1e-3, 1e-3);
  why = fmt("passive wheel energy %.2f -> %.2f J; slider speed 0.30 -> %.1e m/s",
            e0, e1, std::abs(y[pusher_idx::kXd]));
  return e1 < e0 - 0.2 && std::abs(y[pusher_idx::kXd]) < 1e-4;
}

bool prop_qp_oracle(std::string& why) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  QpSettings settings;
  settings.eps = 1e-9;
  settings.max_iterations = 50000;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 10);
    MatrixXd M(n, n);
    VectorXd f(n), lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      f[i] = 2.0 * gauss(rng);
      lo[i] = -std::abs(gauss(rng)) - 0.05;
      hi[i] = std::abs(gauss(rng)) + 0.05;
      for (int j = 0; j < n; ++j) M(i, j) = gauss(rng);
    }
    QpProblem qp;
    qp.H = M * M.transpose() + 0.1 * MatrixXd::Identity(n, n);
    qp.f = f;
    qp.lo = lo;
    qp.hi = hi;
    const QpResult res = solve_qp(qp, std::nullopt, settings);
    if (res.status != QpStatus::Optimal) {
      why = fmt("trial %d did not converge", trial);
      return false;
    }
    const double step = 1.0 / qp.H.operatorNorm();
    VectorXd u = VectorXd::Zero(n);
    for (int k = 0; k < 200000; ++k) {
      u = (u - step * (qp.H * u + qp.f)).cwiseMax(lo).cwiseMin(hi);
    }
    worst = std::max(worst, (res.u - u).cwiseAbs().maxCoeff());
  }
  why = fmt("max deviation from projected-gradient oracle %.1e over 100 QPs "
            "(tol 1e-6)", worst);
  return worst < 1e-6;
}

bool prop_determinism(const WheelRig& rig, std::string& why) {
  const VectorXd x0 = wheel_trial_start(rig.ex, 3);
  const Trajectory a = run_wheel_closed_loop(rig, FitMethod::CckAnalytic, x0, 1.0);
  const Trajectory b = run_wheel_closed_loop(rig, FitMethod::CckAnalytic, x0, 1.0);
  if (a.states.size() != b.states.size()) {
    why = "trajectory lengths differ";
    return false;
  }
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    if (a.states[k] != b.states[k] ||
        (k < a.inputs.size() && a.inputs[k] != b.inputs[k])) {
      why = fmt("divergence at sample %zu", k);
      return false;
    }
  }
  why = fmt("closed-loop replay bit-identical over %zu samples", a.states.size());
  return true;
}

void check_properties(const WheelRig& rig) {
  Clock clk;
  std::string w1, w2, w3, w4, w5;
  const bool p1 = prop_jacobians(w1);
  const bool p2 = prop_contact_continuity(w2);
  const bool p3 = prop_dissipativity(w3);
  const bool p4 = prop_qp_oracle(w4);
  const bool p5 = prop_determinism(rig, w5);
  const bool pass = p1 && p2 && p3 && p4 && p5 && clk.seconds() < 300.0;
  verdict("property-suites", pass, "five sub-suites", clk.seconds());
  std::printf("     [%s] %s\n     [%s] %s\n     [%s] %s\n     [%s] %s\n     [%s] %s\n",
              p1 ? "ok" : "FAIL", w1.c_str(), p2 ? "ok" : "FAIL", w2.c_str(),
              p3 ? "ok" : "FAIL", w3.c_str(), p4 ? "ok" : "FAIL", w4.c_str(),
              p5 ? "ok" : "FAIL", w5.c_str());
}

}  // namespace

int main() {
  std::printf("building fixtures (wheel + pusher models)...\n");
  std::fflush(stdout);
  Clock build_clk;
  WheelExperiment wex;
  WheelRig wheel = build_wheel_rig(wex);
  PusherExperiment pex_sq;
  PusherRig pusher_sq = build_pusher_rig(pex_sq);
  PusherExperiment pex_ci = pex_sq;
  pex_ci.sp.shape = SliderShape::Circle;
  PusherRig pusher_ci = build_pusher_rig(pex_ci);
  std::printf("fixtures ready (%.1f s)\n\n", build_clk.seconds());

  check_compensation_identity(wheel, pusher_sq);
  check_synthetic_recovery();
  check_boundary_prediction(wheel);
  check_wheel_ablation(wheel);
  check_rest_start(wheel);
  check_push_vs_shove(pusher_sq);
  check_reposition(pusher_ci);
  check_dribble(pusher_ci);
  check_latency(pusher_sq, pusher_ci);
  check_properties(wheel);

  std::printf("\n%d of 10 checks failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

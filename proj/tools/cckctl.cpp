// cckctl: experiment driver for the contact-rich Koopman MPC toolkit.
//
// Exit codes: 0 success, 2 per-trial failures recorded in the report,
// 1 fatal error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cck/dataset_io.hpp"
#include "cck/experiments.hpp"
#include "cck/trace_io.hpp"

namespace fs = std::filesystem;
using namespace cck;

namespace {

Config load_config(const std::string& path, long seed_override) {
  Config cfg = path.empty() ? Config::parse_string("") : Config::parse_file(path);
  if (seed_override >= 0) cfg.set("seed", static_cast<double>(seed_override));
  return cfg;
}

bool is_wheel(const Config& cfg) {
  return cfg.str("plant", "rimless-wheel") == "rimless-wheel";
}

SliderShape shape_from(const Config& cfg) {
  return cfg.str("slider.shape", "square") == "circle" ? SliderShape::Circle
                                                       : SliderShape::Square;
}

int cmd_simulate(const Config& cfg, const std::string& out_dir,
                 const std::string& format) {
  fs::create_directories(out_dir);
  Trajectory traj;
  std::vector<std::string> names;
  int input_dim = 0;
  int x_index = 0;
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
  const double duration = cfg.number("sim.duration", 5.0);
  if (is_wheel(cfg)) {
    const WheelExperiment ex = wheel_experiment_from_config(cfg);
    const ContinuousDynamics dyn = make_wheel_dynamics(ex.wp, ex.cp);
    const ExcitationPolicy pol = wheel_excitation(ex);
    const bool passive = cfg.boolean("sim.passive", false);
    SimulateOptions opt;
    opt.duration = duration;
    opt.step = ex.sim_step;
    opt.control_period = ex.control_period;
    opt.record_stride = std::lround(ex.control_period / ex.sim_step);
    opt.contact_counter = [ex](const VectorXd& x) {
      return wheel_contact_count(x, ex.wp, ex.cp);
    };
    const VectorXd x0 =
        passive ? wheel_two_spoke_stance(ex.wp, ex.cp,
                                         wheel_static_penetration(ex.wp, ex.cp))
                : pol.initial_state(seed);
    const Controller ctrl =
        passive ? Controller([](const VectorXd&, double) { return VectorXd::Zero(6); })
                : pol.make_controller(seed);
    traj = simulate(dyn, x0, ctrl, opt);
    names = wheel_schema().state_names;
    input_dim = 6;
    x_index = wheel_idx::kX;
  } else {
    const PusherExperiment ex = pusher_experiment_from_config(cfg, shape_from(cfg));
    const ContinuousDynamics dyn = make_pusher_dynamics(ex.sp);
    const ExcitationPolicy pol = pusher_excitation(ex);
    SimulateOptions opt;
    opt.duration = duration;
    opt.step = ex.sim_step;
    opt.control_period = ex.control_period;
    opt.record_stride = std::lround(ex.control_period / ex.sim_step);
    opt.contact_counter = [ex](const VectorXd& x) {
      return pusher_contact_count(x, ex.sp);
    };
    traj = simulate(dyn, pol.initial_state(seed), pol.make_controller(seed), opt);
    names = pusher_schema().state_names;
    input_dim = 2;
    x_index = pusher_idx::kX;
  }
  const std::string base = out_dir + "/trace";
  write_trace_csv(base + ".csv", traj, names, input_dim);
  if (format == "svg") write_trace_svg(base + ".svg", traj, x_index);
  std::cout << "wrote " << base << ".csv (" << traj.size() << " samples)\n";
  return 0;
}

int cmd_gen_data(const Config& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (is_wheel(cfg)) {
    const WheelExperiment ex = wheel_experiment_from_config(cfg);
    WheelRig rig = build_wheel_rig(ex);
    save_dataset(out_dir + "/dataset.bin", rig.dataset, rig.dict);
    std::cout << "wheel dataset: " << rig.dataset.count() << " snapshots, "
              << rig.dict.lifted_dim() << " lifted dims\n";
  } else {
    const PusherExperiment ex = pusher_experiment_from_config(cfg, shape_from(cfg));
    PusherRig rig = build_pusher_rig(ex);
    save_dataset(out_dir + "/dataset.bin", rig.dataset, rig.dict);
    std::cout << "pusher dataset: " << rig.dataset.count() << " snapshots, "
              << rig.dict.lifted_dim() << " lifted dims\n";
  }
  return 0;
}

int cmd_fit(const Config& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const FitMethod method =
      fit_method_from_string(cfg.str("fit.method", "cck-analytic"));
  if (method == FitMethod::LocalLinearization) {
    std::cerr << "local-linearization has no offline fit artifact\n";
    return 1;
  }
  FitReport report;
  if (is_wheel(cfg)) {
    WheelRig rig = build_wheel_rig(wheel_experiment_from_config(cfg));
    report = rig.fit_report;
    if (method == FitMethod::Dmdc) {
      BinaryContainer c;
      c.header["kind"] = "dmdc";
      c.arrays.emplace_back("A", rig.dmdc.A);
      c.arrays.emplace_back("B", rig.dmdc.B);
      write_container(out_dir + "/model.bin", c);
    } else {
      CckModel m = (method == FitMethod::CckJoint) ? rig.cck_joint : rig.cck;
      if (method == FitMethod::CckNoCompensation) m = m.without_compensation();
      save_cck_model(out_dir + "/model.bin", m);
    }
  } else {
    PusherRig rig = build_pusher_rig(pusher_experiment_from_config(cfg, shape_from(cfg)));
    report = rig.fit_report;
    CckModel m = (method == FitMethod::CckJoint) ? rig.cck_joint : rig.cck;
    if (method == FitMethod::CckNoCompensation) m = m.without_compensation();
    save_cck_model(out_dir + "/model.bin", m);
  }
  std::cout << "fit " << to_string(method) << ": train rmse " << report.train_rmse
            << ", gram condition " << report.gram_condition << "\n";
  return 0;
}

int cmd_mpc_run(const Config& cfg, const std::string& out_dir,
                const std::string& format) {
  fs::create_directories(out_dir);
  const FitMethod method =
      fit_method_from_string(cfg.str("fit.method", "cck-analytic"));
  Trajectory traj;
  TrialMetrics metrics;
  if (is_wheel(cfg)) {
    const WheelExperiment ex = wheel_experiment_from_config(cfg);
    WheelRig rig = build_wheel_rig(ex);
    const VectorXd x0 = wheel_trial_start(ex, ex.seed);
    traj = run_wheel_closed_loop(rig, method, x0, cfg.number("mpc.duration", 20.0));
    metrics = compute_metrics(traj, wheel_idx::kX, wheel_idx::kThetad, ex.control_period);
    write_trace_csv(out_dir + "/mpc_trace.csv", traj, wheel_schema().state_names, 6);
    if (format == "svg") write_trace_svg(out_dir + "/mpc_trace.svg", traj, wheel_idx::kX);
  } else {
    const PusherExperiment ex = pusher_experiment_from_config(cfg, shape_from(cfg));
    PusherRig rig = build_pusher_rig(ex);
    PusherTask task;
    task.true_params = ex.sp;
    task.goal << cfg.number("task.goal_x", 0.3), cfg.number("task.goal_y", 0.0);
    task.duration = cfg.number("mpc.duration", 12.0);
    task.w_pos = cfg.number("mpc.w_pos", ex.w_pos);
    task.w_r = cfg.number("mpc.w_r", ex.w_r);
    task.x0 = VectorXd::Zero(pusher_idx::kDim);
    const double reach =
        (ex.sp.shape == SliderShape::Square) ? 0.5 * ex.sp.side : ex.sp.radius;
    task.x0[pusher_idx::kPx] = -(reach + 0.03);
    traj = run_pusher_closed_loop(rig, task);
    metrics = compute_metrics(traj, pusher_idx::kX, pusher_idx::kThetad, ex.control_period);
    write_trace_csv(out_dir + "/mpc_trace.csv", traj, pusher_schema().state_names, 2);
    if (format == "svg") write_trace_svg(out_dir + "/mpc_trace.svg", traj, pusher_idx::kX);
  }
  MetricsReport report;
  report.experiment = "mpc-run";
  report.config_hash = cfg.hash();
  report.seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
  report.data["trial"] = to_json(metrics);
  if (!metrics.success) report.exit_code = 2;
  write_report(out_dir + "/mpc_report.json", report);
  std::cout << "max x displacement " << metrics.max_x_displacement << " m, mean solve "
            << metrics.mean_solve_ms << " ms\n";
  return report.exit_code;
}

int cmd_export(const std::string& input, const Config& cfg, const std::string& out_dir,
               const std::string& format) {
  fs::create_directories(out_dir);
  const bool wheel = is_wheel(cfg);
  const auto names = wheel ? wheel_schema().state_names : pusher_schema().state_names;
  const int input_dim = wheel ? 6 : 2;
  const int x_index = wheel ? wheel_idx::kX : pusher_idx::kX;
  const Trajectory traj =
      read_trace_csv(input, static_cast<int>(names.size()), input_dim);
  const std::string base = out_dir + "/" + fs::path(input).stem().string();
  if (format == "csv") {
    write_trace_csv(base + ".csv", traj, names, input_dim);
  } else if (format == "svg") {
    write_trace_svg(base + ".svg", traj, x_index);
  } else {
    const TrialMetrics m = compute_metrics(traj, x_index, wheel ? wheel_idx::kThetad
                                                                : pusher_idx::kThetad,
                                           cfg.number("mpc.period", wheel ? 0.01 : 0.1));
    MetricsReport report;
    report.experiment = "export";
    report.config_hash = cfg.hash();
    report.seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
    report.data["trial"] = to_json(m);
    write_report(base + ".json", report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contact-rich Koopman MPC toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", format = "csv", export_input;
  long seed = -1;
  app.add_option("--config", config_path, "experiment config file (TOML-style)");
  app.add_option("--seed", seed, "seed override");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "export format")
      ->check(CLI::IsMember({"csv", "json", "svg"}));

  auto* c_sim = app.add_subcommand("simulate", "open-loop excitation rollout");
  auto* c_gen = app.add_subcommand("gen-data", "generate identification snapshots");
  auto* c_fit = app.add_subcommand("fit", "fit a lifted model and save it");
  auto* c_mpc = app.add_subcommand("mpc-run", "single closed-loop MPC run");
  auto* c_abl = app.add_subcommand("ablation", "wheel model-class ablation study");
  auto* c_psu = app.add_subcommand("pusher-suite", "push/shove/reposition/dribble suite");
  auto* c_ben = app.add_subcommand("bench", "MPC solve-time benchmark");
  auto* c_swp = app.add_subcommand("stiffness-sweep", "contact stiffness sweep");
  auto* c_exp = app.add_subcommand("export", "re-export a stored trace");
  c_exp->add_option("input", export_input, "trace CSV to convert")->required();
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const Config cfg = load_config(config_path, seed);
    if (c_sim->parsed()) return cmd_simulate(cfg, out_dir, format);
    if (c_gen->parsed()) return cmd_gen_data(cfg, out_dir);
    if (c_fit->parsed()) return cmd_fit(cfg, out_dir);
    if (c_mpc->parsed()) return cmd_mpc_run(cfg, out_dir, format);
    if (c_abl->parsed()) return run_wheel_ablation(cfg, out_dir).exit_code;
    if (c_psu->parsed()) return run_pusher_suite(cfg, out_dir).exit_code;
    if (c_ben->parsed()) return run_benchmark(cfg, out_dir).exit_code;
    if (c_swp->parsed()) return run_stiffness_sweep(cfg, out_dir).exit_code;
    if (c_exp->parsed()) return cmd_export(export_input, cfg, out_dir, format);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

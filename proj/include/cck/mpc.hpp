#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "cck/lifting.hpp"
#include "cck/model_fit.hpp"
#include "cck/qp_solver.hpp"

namespace cck {

/// Cost contribution for a coordinate that is not part of the lifted state
/// but is the time integral of one that is (slider x, y): the predicted value
/// uses trapezoidal integration of the named velocity row.
struct IntegratedOutput {
  int velocity_z_index = 0;
  double weight = 0.0;
};

struct MpcConfig {
  int horizon = 10;
  double dt = 0.1;
  VectorXd q_weights;  // diagonal state weight, zero on embedding rows
  VectorXd r_weights;  // diagonal input weight, > 0
  VectorXd u_min, u_max;
  VectorXd z_min, z_max;  // empty => unbounded
  std::vector<IntegratedOutput> integrated;
  QpSettings qp;
};

/// Dense condensation of the lifted-space MPC problem: states are eliminated
/// so the decision variables are the stacked inputs. The Hessian depends only
/// on (A, B, weights, horizon) and is built once; per-step work is the
/// gradient and bound shifts.
class CondensedMpc {
 public:
  CondensedMpc(const MatrixXd& A, const MatrixXd& B, const VectorXd& c,
               const MpcConfig& cfg);

  /// z_ref: n_z x (N+1); s0/s_ref cover the integrated outputs (may be empty
  /// when none are configured).
  QpProblem build(const VectorXd& z0, const MatrixXd& z_ref,
                  const VectorXd& s0 = VectorXd(),
                  const MatrixXd& s_ref = MatrixXd()) const;

  /// Open-loop rollout of the model under the stacked input vector.
  MatrixXd rollout(const VectorXd& z0, const VectorXd& u_stacked) const;

  const MatrixXd& hessian() const { return H_; }
  const MpcConfig& config() const { return cfg_; }
  int input_dim() const { return r_; }

 private:
  MpcConfig cfg_;
  MatrixXd A_, B_;
  VectorXd c_;
  int nz_ = 0, r_ = 0;

  std::vector<int> cost_rows_;   // z rows with nonzero weight
  std::vector<int> box_rows_;    // z rows with finite bounds
  MatrixXd gamma_cost_;          // (N * n_cost) x (N r): input-to-tracked-rows map
  MatrixXd phi_cost_;            // (N * n_cost) x n_z
  VectorXd off_cost_;            // affine part
  VectorXd w_cost_;              // stacked weights matching gamma_cost_ rows
  MatrixXd gamma_box_, phi_box_;
  VectorXd off_box_;
  MatrixXd s_map_, s_phi_;       // integrated outputs
  VectorXd s_off_, w_int_;
  MatrixXd H_;
  MatrixXd C_;                   // empty when only the input box is active
};

struct MpcDiagnostics {
  QpStatus status = QpStatus::Optimal;
  int iterations = 0;
  double solve_ms = 0.0;   // lift + build + solve wall time
  double objective = 0.0;
  bool held_last = false;
  MatrixXd predicted;      // lifted rollout, n_z x (N+1)
};

/// Receding-horizon controller: lifts the measurement, solves the condensed
/// QP warm-started from the shifted previous solution, applies u_0.
class MpcController {
 public:
  MpcController(const MatrixXd& A, const MatrixXd& B, const VectorXd& c,
                Dictionary dict, const MpcConfig& cfg);
  MpcController(const CckModel& model, const MpcConfig& cfg);

  /// z_ref columns are the N+1 reference points over the horizon; s0/s_ref
  /// feed the integrated outputs when configured.
  VectorXd step(const VectorXd& x_measured, const MatrixXd& z_ref,
                const VectorXd& s0 = VectorXd(),
                const MatrixXd& s_ref = MatrixXd(),
                MpcDiagnostics* diag = nullptr);

  void reset();
  const CondensedMpc& condensed() const { return mpc_; }
  const Dictionary& dictionary() const { return dict_; }

 private:
  Dictionary dict_;
  CondensedMpc mpc_;
  AdmmQpSolver solver_;
  std::optional<QpWarmStart> warm_;
  VectorXd last_input_;
};

}  // namespace cck

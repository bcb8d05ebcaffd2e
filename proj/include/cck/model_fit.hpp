#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

#include "cck/lifting.hpp"

namespace cck {

/// Lifted-space LTI model z+ = A z + [B_p; B_g] u with the actuator block of
/// the control matrix fixed by the actuator dynamics.
struct CckModel {
  MatrixXd A;
  MatrixXd B_p;  // m x r
  MatrixXd B_g;  // (n_z - m) x r
  Dictionary dict;
  double dt = 0.0;

  int actuator_dim() const { return static_cast<int>(B_p.rows()); }
  MatrixXd B() const;
  MatrixXd A_pp() const { return A.topLeftCorner(actuator_dim(), actuator_dim()); }
  MatrixXd A_gp() const {
    const int m = actuator_dim();
    return A.bottomLeftCorner(A.rows() - m, m);
  }
  /// Same model with the embedding compensation dropped (B_g := 0).
  CckModel without_compensation() const;
};

/// Generic affine model z+ = A z + B u + c. CCK and DMDc models have c = 0;
/// local linearization carries the offset of the flow map.
struct LinearModel {
  MatrixXd A;
  MatrixXd B;
  VectorXd c;
};

struct IllConditionedFitError : std::runtime_error {
  double condition;
  explicit IllConditionedFitError(double cond)
      : std::runtime_error("Gram matrix condition number " + std::to_string(cond) +
                           " exceeds 1e12; increase ridge or reduce observables"),
        condition(cond) {}
};

struct FitReport {
  double train_rmse = 0.0;
  double gram_condition = 0.0;
};

/// Actuator input channels, used to build B_p exactly (zero-order hold).
struct ActuatorSpec {
  enum class Kind {
    VelocityIntegrator,  // p_dot = u; B_p = dt * I
    TorqueDoubleIntegrator,  // per channel: (psi, psid) rows get (dt^2/2/I, dt/I)
  };
  Kind kind = Kind::VelocityIntegrator;
  int channels = 0;
  double inertia = 1.0;  // TorqueDoubleIntegrator only
};

/// Exact ZOH discretization of the actuator input channel over dt.
/// For TorqueDoubleIntegrator the actuator block is ordered
/// [psi_1..psi_k, psid_1..psid_k].
MatrixXd build_Bp(const ActuatorSpec& spec, double dt);

/// Ridge least squares for the autonomous operator: the actuator-block target
/// is p_bar = p_{t+1} - B_p u_t and the embedding targets are re-lifted at
/// (p_bar, q_{t+1}).
MatrixXd fit_A_autonomous(const SnapshotDataset& ds, const Dictionary& dict,
                          const MatrixXd& B_p, double ridge,
                          FitReport* report = nullptr);

/// Embedding compensation B_g = A_gp A_pp^{-1} B_p. Throws on singular A_pp.
MatrixXd build_Bg(const MatrixXd& A, const MatrixXd& B_p);

/// Joint fit with the actuator input block pinned to B_p; solves for A and
/// B_g only. Throws if the dataset carries no input excitation.
void fit_joint(const SnapshotDataset& ds, const MatrixXd& B_p, double ridge,
               MatrixXd& A, MatrixXd& B_g, FitReport* report = nullptr);

/// Unconstrained least squares for both A and B on lifted data.
LinearModel fit_dmdc(const SnapshotDataset& ds, double ridge,
                     FitReport* report = nullptr);

/// Central-difference Jacobians of the dt-step flow map at (x0, u0), with the
/// affine offset making the model exact at the expansion point.
LinearModel local_linearize(const ContinuousDynamics& dyn, const VectorXd& x0,
                            const VectorXd& u0, double dt, double sim_step);

/// Linear rollout; returns lifted_dim x (len(u)+1).
MatrixXd predict(const MatrixXd& A, const MatrixXd& B, const VectorXd& c,
                 const VectorXd& z0, const MatrixXd& u_sequence);

/// Scale-aware default ridge: 1e-6 * trace(Gram) / n_z.
double default_ridge(const MatrixXd& regressors);

void save_cck_model(const std::string& path, const CckModel& model);
CckModel load_cck_model(const std::string& path);

}  // namespace cck

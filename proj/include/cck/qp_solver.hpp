#pragma once

#include <Eigen/Dense>
#include <optional>

namespace cck {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class QpStatus { Optimal, MaxIterations, NumericalFailure };

/// Box-constrained convex QP: min 1/2 u'Hu + f'u  s.t.  lo <= C u <= hi.
/// C defaults to identity (plain input box). H must be PSD.
struct QpProblem {
  MatrixXd H;
  VectorXd f;
  MatrixXd C;   // empty => identity
  VectorXd lo;
  VectorXd hi;
  bool identity_constraints() const { return C.size() == 0; }
};

struct QpSettings {
  double eps = 1e-6;
  int max_iterations = 4000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;  // over-relaxation
  int check_every = 10;
};

struct QpResult {
  VectorXd u;
  QpStatus status = QpStatus::NumericalFailure;
  int iterations = 0;
  double solve_time_ms = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

struct QpWarmStart {
  VectorXd u;
  VectorXd dual;  // same length as the constraint vector
};

/// Operator-splitting solver with a cached factorization; reusable across
/// solves that share H and C (only f and the bounds change).
class AdmmQpSolver {
 public:
  AdmmQpSolver() = default;
  AdmmQpSolver(MatrixXd H, MatrixXd C, QpSettings settings = {});

  QpResult solve(const VectorXd& f, const VectorXd& lo, const VectorXd& hi,
                 const std::optional<QpWarmStart>& warm = std::nullopt) const;

  const QpSettings& settings() const { return settings_; }

 private:
  MatrixXd H_;
  MatrixXd C_;  // empty => identity (stored row-equilibrated)
  VectorXd row_scale_;
  QpSettings settings_;
  Eigen::LDLT<MatrixXd> kkt_;
};

QpResult solve_qp(const QpProblem& qp,
                  const std::optional<QpWarmStart>& warm = std::nullopt,
                  const QpSettings& settings = {});

}  // namespace cck

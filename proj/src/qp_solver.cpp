#include "cck/qp_solver.hpp"

#include <chrono>
#include <cmath>

namespace cck {

AdmmQpSolver::AdmmQpSolver(MatrixXd H, MatrixXd C, QpSettings settings)
    : H_(std::move(H)), C_(std::move(C)), settings_(settings) {
  MatrixXd kkt = 0.5 * (H_ + H_.transpose());
  kkt.diagonal().array() += settings_.sigma;
  if (C_.size() == 0) {
    kkt.diagonal().array() += settings_.rho;
  } else {
    // Equilibrate: constraint rows can differ by orders of magnitude (input
    // box vs condensed state responses), which stalls the splitting badly.
    row_scale_ = VectorXd::Ones(C_.rows());
    for (long i = 0; i < C_.rows(); ++i) {
      const double nrm = C_.row(i).norm();
      if (nrm > 1e-12) row_scale_[i] = 1.0 / nrm;
    }
    C_ = row_scale_.asDiagonal() * C_;
    kkt += settings_.rho * C_.transpose() * C_;
  }
  kkt_.compute(kkt);
}

QpResult AdmmQpSolver::solve(const VectorXd& f, const VectorXd& lo,
                             const VectorXd& hi,
                             const std::optional<QpWarmStart>& warm) const {
  const auto t_start = std::chrono::steady_clock::now();
  const bool ident = (C_.size() == 0);
  const long n = H_.rows();
  const long m = ident ? n : C_.rows();
  const double rho = settings_.rho, sigma = settings_.sigma, alpha = settings_.alpha;

  VectorXd lo_s = lo, hi_s = hi;
  if (!ident) {
    lo_s = row_scale_.asDiagonal() * lo;
    hi_s = row_scale_.asDiagonal() * hi;
    for (long i = 0; i < m; ++i) {
      if (std::isinf(lo[i])) lo_s[i] = lo[i];
      if (std::isinf(hi[i])) hi_s[i] = hi[i];
    }
  }

  auto apply_C = [&](const VectorXd& v) -> VectorXd { return ident ? v : C_ * v; };
  auto apply_Ct = [&](const VectorXd& v) -> VectorXd {
    return ident ? v : VectorXd(C_.transpose() * v);
  };

  VectorXd x = (warm && warm->u.size() == n) ? warm->u : VectorXd::Zero(n);
  VectorXd y = (warm && warm->dual.size() == m) ? warm->dual : VectorXd::Zero(m);
  VectorXd s = apply_C(x).cwiseMax(lo_s).cwiseMin(hi_s);

  QpResult res;
  res.status = QpStatus::MaxIterations;
  int it = 0;
  for (it = 1; it <= settings_.max_iterations; ++it) {
    const VectorXd rhs = sigma * x - f + apply_Ct(rho * s - y);
    const VectorXd x_new = kkt_.solve(rhs);
    const VectorXd cx = apply_C(x_new);
    const VectorXd cx_relaxed = alpha * cx + (1.0 - alpha) * s;
    const VectorXd s_new = (cx_relaxed + y / rho).cwiseMax(lo_s).cwiseMin(hi_s);
    y += rho * (cx_relaxed - s_new);

    const bool check = (it % settings_.check_every == 0) || it == settings_.max_iterations;
    if (check) {
      const VectorXd r_prim = cx - s_new;
      const VectorXd r_dual = H_ * x_new + f + apply_Ct(y);
      const double scale_p = std::max({cx.lpNorm<Eigen::Infinity>(),
                                       s_new.lpNorm<Eigen::Infinity>(), 1.0});
      const double scale_d = std::max({(H_ * x_new).lpNorm<Eigen::Infinity>(),
                                       f.lpNorm<Eigen::Infinity>(),
                                       apply_Ct(y).lpNorm<Eigen::Infinity>(), 1.0});
      res.primal_residual = r_prim.lpNorm<Eigen::Infinity>();
      res.dual_residual = r_dual.lpNorm<Eigen::Infinity>();
      if (!x_new.allFinite()) {
        res.status = QpStatus::NumericalFailure;
        x = x_new;
        break;
      }
      if (res.primal_residual <= settings_.eps * scale_p &&
          res.dual_residual <= settings_.eps * scale_d) {
        res.status = QpStatus::Optimal;
        x = x_new;
        s = s_new;
        break;
      }
    }
    x = x_new;
    s = s_new;
  }

  // Boxes on the decision variables are satisfied exactly: return the
  // projected iterate when constraints are a plain box.
  res.u = ident ? s : x;
  res.iterations = std::min(it, settings_.max_iterations);
  res.solve_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

QpResult solve_qp(const QpProblem& qp, const std::optional<QpWarmStart>& warm,
                  const QpSettings& settings) {
  AdmmQpSolver solver(qp.H, qp.C, settings);
  return solver.solve(qp.f, qp.lo, qp.hi, warm);
}

}  // namespace cck

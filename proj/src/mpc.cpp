#include "cck/mpc.hpp"

#include <chrono>
#include <cmath>

namespace cck {

CondensedMpc::CondensedMpc(const MatrixXd& A, const MatrixXd& B, const VectorXd& c,
                           const MpcConfig& cfg)
    : cfg_(cfg), A_(A), B_(B), c_(c), nz_(static_cast<int>(A.rows())),
      r_(static_cast<int>(B.cols())) {
  if (c_.size() == 0) c_ = VectorXd::Zero(nz_);
  const int N = cfg_.horizon;
  if (cfg_.q_weights.size() != nz_) throw std::invalid_argument("q_weights size");
  if ((cfg_.r_weights.array() <= 0.0).any()) throw std::invalid_argument("R must be PD");

  for (int i = 0; i < nz_; ++i) {
    if (cfg_.q_weights[i] != 0.0) cost_rows_.push_back(i);
  }
  if (cfg_.z_min.size() == nz_) {
    for (int i = 0; i < nz_; ++i) {
      if (std::isfinite(cfg_.z_min[i]) || std::isfinite(cfg_.z_max[i])) {
        box_rows_.push_back(i);
      }
    }
  }

  const int nw = static_cast<int>(cost_rows_.size());
  const int nb = static_cast<int>(box_rows_.size());
  const int ni = static_cast<int>(cfg_.integrated.size());
  gamma_cost_.setZero(N * nw, N * r_);
  phi_cost_.setZero(N * nw, nz_);
  off_cost_.setZero(N * nw);
  w_cost_.setZero(N * nw);
  gamma_box_.setZero(N * nb, N * r_);
  phi_box_.setZero(N * nb, nz_);
  off_box_.setZero(N * nb);
  s_map_.setZero(N * ni, N * r_);
  s_phi_.setZero(N * ni, nz_);
  s_off_.setZero(N * ni);
  w_int_.setZero(N * ni);

  // Forward propagation: z_t = phi_t z0 + M_t U + off_t.
  MatrixXd M = MatrixXd::Zero(nz_, N * r_);
  MatrixXd phi = MatrixXd::Identity(nz_, nz_);
  VectorXd off = VectorXd::Zero(nz_);
  MatrixXd M_prev, phi_prev;
  VectorXd off_prev;
  // Integrated-output accumulators (trapezoid over the velocity row).
  MatrixXd acc_map = MatrixXd::Zero(ni, N * r_);
  MatrixXd acc_phi = MatrixXd::Zero(ni, nz_);
  VectorXd acc_off = VectorXd::Zero(ni);

  for (int t = 1; t <= N; ++t) {
    M_prev = M;
    phi_prev = phi;
    off_prev = off;
    M = A_ * M_prev;
    M.middleCols((t - 1) * r_, r_) += B_;
    phi = A_ * phi_prev;
    off = A_ * off_prev + c_;

    for (int k = 0; k < nw; ++k) {
      const int row = cost_rows_[k];
      gamma_cost_.row((t - 1) * nw + k) = M.row(row);
      phi_cost_.row((t - 1) * nw + k) = phi.row(row);
      off_cost_[(t - 1) * nw + k] = off[row];
      w_cost_[(t - 1) * nw + k] = cfg_.q_weights[row];
    }
    for (int k = 0; k < nb; ++k) {
      const int row = box_rows_[k];
      gamma_box_.row((t - 1) * nb + k) = M.row(row);
      phi_box_.row((t - 1) * nb + k) = phi.row(row);
      off_box_[(t - 1) * nb + k] = off[row];
    }
    for (int k = 0; k < ni; ++k) {
      const int v = cfg_.integrated[k].velocity_z_index;
      acc_map.row(k) += 0.5 * cfg_.dt * (M_prev.row(v) + M.row(v));
      acc_phi.row(k) += 0.5 * cfg_.dt * (phi_prev.row(v) + phi.row(v));
      acc_off[k] += 0.5 * cfg_.dt * (off_prev[v] + off[v]);
      s_map_.row((t - 1) * ni + k) = acc_map.row(k);
      s_phi_.row((t - 1) * ni + k) = acc_phi.row(k);
      s_off_[(t - 1) * ni + k] = acc_off[k];
      w_int_[(t - 1) * ni + k] = cfg_.integrated[k].weight;
    }
  }

  H_ = 2.0 * (gamma_cost_.transpose() * w_cost_.asDiagonal() * gamma_cost_);
  if (ni > 0) H_ += 2.0 * (s_map_.transpose() * w_int_.asDiagonal() * s_map_);
  for (int t = 0; t < N; ++t) {
    H_.block(t * r_, t * r_, r_, r_) += 2.0 * MatrixXd(cfg_.r_weights.asDiagonal());
  }
  H_ = 0.5 * (H_ + H_.transpose());

  if (nb > 0) {
    C_.resize(N * r_ + N * nb, N * r_);
    C_ << MatrixXd::Identity(N * r_, N * r_), gamma_box_;
  }
}

QpProblem CondensedMpc::build(const VectorXd& z0, const MatrixXd& z_ref,
                              const VectorXd& s0, const MatrixXd& s_ref) const {
  const int N = cfg_.horizon;
  const int nw = static_cast<int>(cost_rows_.size());
  const int ni = static_cast<int>(cfg_.integrated.size());
  if (!z0.allFinite() || !z_ref.allFinite()) {
    throw std::invalid_argument("non-finite state or reference");
  }
  if (z_ref.rows() != nz_ || z_ref.cols() != N + 1) {
    throw std::invalid_argument("z_ref must be n_z x (N+1)");
  }

  QpProblem qp;
  qp.H = H_;

  VectorXd resid(N * nw);
  for (int t = 1; t <= N; ++t) {
    for (int k = 0; k < nw; ++k) {
      resid[(t - 1) * nw + k] = -z_ref(cost_rows_[k], t);
    }
  }
  resid += phi_cost_ * z0 + off_cost_;
  qp.f = 2.0 * gamma_cost_.transpose() * (w_cost_.asDiagonal() * resid);

  if (ni > 0) {
    if (s0.size() != ni || s_ref.rows() != ni || s_ref.cols() != N + 1) {
      throw std::invalid_argument("integrated-output reference shape");
    }
    VectorXd rs(N * ni);
    for (int t = 1; t <= N; ++t) {
      for (int k = 0; k < ni; ++k) {
        rs[(t - 1) * ni + k] = s0[k] - s_ref(k, t);
      }
    }
    rs += s_phi_ * z0 + s_off_;
    qp.f += 2.0 * s_map_.transpose() * (w_int_.asDiagonal() * rs);
  }

  VectorXd u_lo = cfg_.u_min.size() == r_
                      ? cfg_.u_min.replicate(N, 1).eval()
                      : VectorXd::Constant(N * r_, -std::numeric_limits<double>::infinity());
  VectorXd u_hi = cfg_.u_max.size() == r_
                      ? cfg_.u_max.replicate(N, 1).eval()
                      : VectorXd::Constant(N * r_, std::numeric_limits<double>::infinity());

  if (box_rows_.empty()) {
    qp.lo = u_lo;
    qp.hi = u_hi;
    return qp;
  }
  const int nb = static_cast<int>(box_rows_.size());
  const VectorXd shift = phi_box_ * z0 + off_box_;
  VectorXd z_lo(N * nb), z_hi(N * nb);
  for (int t = 0; t < N; ++t) {
    for (int k = 0; k < nb; ++k) {
      z_lo[t * nb + k] = cfg_.z_min[box_rows_[k]] - shift[t * nb + k];
      z_hi[t * nb + k] = cfg_.z_max[box_rows_[k]] - shift[t * nb + k];
    }
  }
  qp.C = C_;
  qp.lo.resize(u_lo.size() + z_lo.size());
  qp.lo << u_lo, z_lo;
  qp.hi.resize(u_hi.size() + z_hi.size());
  qp.hi << u_hi, z_hi;
  return qp;
}

MatrixXd CondensedMpc::rollout(const VectorXd& z0, const VectorXd& u_stacked) const {
  const int N = cfg_.horizon;
  MatrixXd traj(nz_, N + 1);
  traj.col(0) = z0;
  for (int t = 0; t < N; ++t) {
    traj.col(t + 1) = A_ * traj.col(t) + B_ * u_stacked.segment(t * r_, r_) + c_;
  }
  return traj;
}

MpcController::MpcController(const MatrixXd& A, const MatrixXd& B, const VectorXd& c,
                             Dictionary dict, const MpcConfig& cfg)
    : dict_(std::move(dict)), mpc_(A, B, c, cfg) {
  QpProblem probe = mpc_.build(
      VectorXd::Zero(A.rows()), MatrixXd::Zero(A.rows(), cfg.horizon + 1),
      VectorXd::Zero(cfg.integrated.size()),
      MatrixXd::Zero(cfg.integrated.size(), cfg.horizon + 1));
  solver_ = AdmmQpSolver(probe.H, probe.C, cfg.qp);
  last_input_ = VectorXd::Zero(B.cols());
}

MpcController::MpcController(const CckModel& model, const MpcConfig& cfg)
    : MpcController(model.A, model.B(), VectorXd(), model.dict, cfg) {}

void MpcController::reset() {
  warm_.reset();
  last_input_.setZero();
}

VectorXd MpcController::step(const VectorXd& x_measured, const MatrixXd& z_ref,
                             const VectorXd& s0, const MatrixXd& s_ref,
                             MpcDiagnostics* diag) {
  const auto t_start = std::chrono::steady_clock::now();
  const int r = mpc_.input_dim();
  const int N = mpc_.config().horizon;

  const VectorXd z0 = dict_.lift(x_measured);
  const QpProblem qp = mpc_.build(z0, z_ref, s0, s_ref);
  const QpResult res = solver_.solve(qp.f, qp.lo, qp.hi, warm_);

  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();

  VectorXd u0;
  bool held = false;
  if (res.status == QpStatus::NumericalFailure) {
    u0 = last_input_;
    held = true;
  } else {
    u0 = res.u.head(r);
    last_input_ = u0;
    // Shift for the next call: drop the applied stage, repeat the tail.
    QpWarmStart next;
    next.u.resize(N * r);
    next.u.head((N - 1) * r) = res.u.tail((N - 1) * r);
    next.u.tail(r) = res.u.tail(r);
    warm_ = next;
  }

  if (diag) {
    diag->status = res.status;
    diag->iterations = res.iterations;
    diag->solve_ms = ms;
    diag->held_last = held;
    if (!held) {
      diag->predicted = mpc_.rollout(z0, res.u);
      diag->objective = 0.5 * res.u.dot(qp.H * res.u) + qp.f.dot(res.u);
    }
  }
  return u0;
}

}  // namespace cck

#include "cck/model_fit.hpp"

#include <cmath>

#include "cck/dataset_io.hpp"

namespace cck {

MatrixXd CckModel::B() const {
  MatrixXd b(B_p.rows() + B_g.rows(), B_p.cols());
  b << B_p, B_g;
  return b;
}

CckModel CckModel::without_compensation() const {
  CckModel m = *this;
  m.B_g.setZero();
  return m;
}

double default_ridge(const MatrixXd& regressors) {
  const double tr = regressors.rowwise().squaredNorm().sum();
  return 1e-6 * tr / static_cast<double>(regressors.rows());
}

namespace {

// Solves min_M ||Y - M X||_F^2 + ridge ||M||_F^2 via normal equations.
MatrixXd ridge_solve(const MatrixXd& Y, const MatrixXd& X, double ridge,
                     double* condition) {
  MatrixXd gram = X * X.transpose();
  gram.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  if (condition) *condition = cond;
  if (cond > 1e12) throw IllConditionedFitError(cond);
  Eigen::LDLT<MatrixXd> ldlt(gram);
  return ldlt.solve(X * Y.transpose()).transpose();
}

double rmse(const MatrixXd& Y, const MatrixXd& Yhat) {
  return std::sqrt((Y - Yhat).squaredNorm() / static_cast<double>(Y.cols()));
}

}  // namespace

MatrixXd build_Bp(const ActuatorSpec& spec, double dt) {
  const int k = spec.channels;
  if (spec.kind == ActuatorSpec::Kind::VelocityIntegrator) {
    return dt * MatrixXd::Identity(k, k);
  }
  MatrixXd bp = MatrixXd::Zero(2 * k, k);
  for (int i = 0; i < k; ++i) {
    bp(i, i) = dt * dt / (2.0 * spec.inertia);
    bp(k + i, i) = dt / spec.inertia;
  }
  return bp;
}

MatrixXd fit_A_autonomous(const SnapshotDataset& ds, const Dictionary& dict,
                          const MatrixXd& B_p, double ridge, FitReport* report) {
  const int m = static_cast<int>(B_p.rows());
  const long n = ds.count();
  MatrixXd Y(dict.lifted_dim(), n);
  for (long t = 0; t < n; ++t) {
    const VectorXd p_bar =
        ds.z1.col(t).head(m) - B_p * ds.u.col(t);
    Y.col(t) = dict.lift_with_actuator(ds.x1.col(t), p_bar);
  }
  double cond = 0.0;
  MatrixXd A = ridge_solve(Y, ds.z0, ridge, &cond);
  if (report) {
    report->gram_condition = cond;
    report->train_rmse = rmse(Y, A * ds.z0);
  }
  return A;
}

MatrixXd build_Bg(const MatrixXd& A, const MatrixXd& B_p) {
  const int m = static_cast<int>(B_p.rows());
  const MatrixXd App = A.topLeftCorner(m, m);
  Eigen::FullPivLU<MatrixXd> lu(App);
  if (!lu.isInvertible()) {
    Eigen::JacobiSVD<MatrixXd> svd(App);
    const double cond = svd.singularValues()(0) /
                        svd.singularValues()(svd.singularValues().size() - 1);
    throw std::runtime_error("A_pp is singular (condition " + std::to_string(cond) + ")");
  }
  return A.bottomLeftCorner(A.rows() - m, m) * lu.solve(B_p);
}

void fit_joint(const SnapshotDataset& ds, const MatrixXd& B_p, double ridge,
               MatrixXd& A, MatrixXd& B_g, FitReport* report) {
  const int m = static_cast<int>(B_p.rows());
  const int nz = static_cast<int>(ds.z0.rows());
  const int r = static_cast<int>(ds.u.rows());
  const long n = ds.count();
  if (ds.u.norm() < 1e-12 * std::sqrt(static_cast<double>(std::max(1l, n)))) {
    throw std::invalid_argument("B_g is unidentifiable: dataset has no input excitation");
  }

  // Actuator rows: input block pinned to B_p, regress the corrected target on z.
  const MatrixXd Yp = ds.z1.topRows(m) - B_p * ds.u;
  double cond_p = 0.0;
  const MatrixXd Ap = ridge_solve(Yp, ds.z0, ridge, &cond_p);

  // Embedding rows: regress on [z; u] for A_g rows and B_g together.
  MatrixXd W(nz + r, n);
  W << ds.z0, ds.u;
  double cond_g = 0.0;
  const MatrixXd Mg = ridge_solve(ds.z1.bottomRows(nz - m), W, ridge, &cond_g);

  A.resize(nz, nz);
  A.topRows(m) = Ap;
  A.bottomRows(nz - m) = Mg.leftCols(nz);
  B_g = Mg.rightCols(r);
  if (report) {
    report->gram_condition = std::max(cond_p, cond_g);
    MatrixXd B(nz, r);
    B << B_p, B_g;
    report->train_rmse = rmse(ds.z1, A * ds.z0 + B * ds.u);
  }
}

LinearModel fit_dmdc(const SnapshotDataset& ds, double ridge, FitReport* report) {
  const int nz = static_cast<int>(ds.z0.rows());
  const int r = static_cast<int>(ds.u.rows());
  MatrixXd W(nz + r, ds.count());
  W << ds.z0, ds.u;
  double cond = 0.0;
  const MatrixXd M = ridge_solve(ds.z1, W, ridge, &cond);
  LinearModel lm;
  lm.A = M.leftCols(nz);
  lm.B = M.rightCols(r);
  lm.c = VectorXd::Zero(nz);
  if (report) {
    report->gram_condition = cond;
    report->train_rmse = rmse(ds.z1, lm.A * ds.z0 + lm.B * ds.u);
  }
  return lm;
}

LinearModel local_linearize(const ContinuousDynamics& dyn, const VectorXd& x0,
                            const VectorXd& u0, double dt, double sim_step) {
  const long substeps = std::max(1l, std::lround(dt / sim_step));
  const double h = dt / static_cast<double>(substeps);
  auto flow = [&](const VectorXd& x, const VectorXd& u) {
    VectorXd xs = x;
    for (long k = 0; k < substeps; ++k) xs = integrate_step(dyn, xs, u, k * h, h);
    return xs;
  };

  const int n = dyn.state_dim, r = dyn.input_dim;
  LinearModel lm;
  lm.A.resize(n, n);
  lm.B.resize(n, r);
  for (int j = 0; j < n; ++j) {
    const double eps = 1e-6 * std::max(1.0, std::abs(x0[j]));
    VectorXd xp = x0, xm = x0;
    xp[j] += eps;
    xm[j] -= eps;
    lm.A.col(j) = (flow(xp, u0) - flow(xm, u0)) / (2.0 * eps);
  }
  for (int j = 0; j < r; ++j) {
    const double eps = 1e-6 * std::max(1.0, std::abs(u0[j]));
    VectorXd up = u0, um = u0;
    up[j] += eps;
    um[j] -= eps;
    lm.B.col(j) = (flow(x0, up) - flow(x0, um)) / (2.0 * eps);
  }
  if (!lm.A.allFinite() || !lm.B.allFinite()) {
    throw std::runtime_error("non-finite flow Jacobian in local linearization");
  }
  lm.c = flow(x0, u0) - lm.A * x0 - lm.B * u0;
  return lm;
}

MatrixXd predict(const MatrixXd& A, const MatrixXd& B, const VectorXd& c,
                 const VectorXd& z0, const MatrixXd& u_sequence) {
  const long steps = u_sequence.cols();
  MatrixXd traj(z0.size(), steps + 1);
  traj.col(0) = z0;
  for (long t = 0; t < steps; ++t) {
    traj.col(t + 1) = A * traj.col(t) + B * u_sequence.col(t);
    if (c.size() > 0) traj.col(t + 1) += c;
  }
  return traj;
}

void save_cck_model(const std::string& path, const CckModel& model) {
  BinaryContainer c;
  c.header["kind"] = "model";
  c.header["dt"] = model.dt;
  c.header["dictionary"] = dictionary_header(model.dict);
  append_dictionary_arrays(model.dict, c);
  c.arrays.emplace_back("A", model.A);
  c.arrays.emplace_back("B_p", model.B_p);
  c.arrays.emplace_back("B_g", model.B_g);
  write_container(path, c);
}

CckModel load_cck_model(const std::string& path) {
  BinaryContainer c = read_container(path);
  if (c.header.at("kind") != "model") throw std::runtime_error("not a model: " + path);
  CckModel m;
  m.dt = c.header.at("dt");
  m.dict = dictionary_from_container(c.header.at("dictionary"), c);
  m.A = c.array("A");
  m.B_p = c.array("B_p");
  m.B_g = c.array("B_g");
  return m;
}

}  // namespace cck

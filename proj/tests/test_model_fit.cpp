#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "cck/model_fit.hpp"

using namespace cck;

namespace {

// Synthetic lifted-linear plant: z+ = A z + [B_p; B_g] u with known operators.
// The dictionary is the identity embedding (no RBF block) so the snapshot
// generator can work directly in lifted coordinates.
struct SyntheticSystem {
  MatrixXd A;
  MatrixXd B_p, B_g;
  Dictionary dict;
  SnapshotDataset dataset;
};

// input_in_plant: whether the generated snapshots carry the B_g input effect
// on the plant rows. The autonomous fit is consistent only without it (the
// identity embedding gives the re-lift step nothing to correct); the joint
// and DMDc fits identify the full [B_p; B_g] channel.
SyntheticSystem make_synthetic(int n, int m, int r, long samples, std::uint64_t seed,
                               bool input_in_plant = true) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto randn = [&](long rows, long cols) {
    MatrixXd M(rows, cols);
    for (long i = 0; i < rows; ++i)
      for (long j = 0; j < cols; ++j) M(i, j) = gauss(rng);
    return M;
  };

  SyntheticSystem sys;
  MatrixXd A = randn(n, n);
  A *= 0.9 / std::abs(A.eigenvalues().cwiseAbs().maxCoeff());  // stable
  // nonsingular actuator block so the analytic compensation exists
  A.topLeftCorner(m, m) += MatrixXd::Identity(m, m);
  sys.A = A;
  sys.B_p = randn(m, r);
  sys.B_g = A.bottomLeftCorner(n - m, m) *
            A.topLeftCorner(m, m).inverse() * sys.B_p;

  PlantSchema schema;
  schema.id = "synthetic";
  schema.state_dim = n;
  schema.input_dim = r;
  for (int i = 0; i < m; ++i) schema.actuator_idx.push_back(i);
  for (int i = m; i < n; ++i) schema.plant_idx.push_back(i);
  for (int i = 0; i < n; ++i) schema.state_names.push_back("z" + std::to_string(i));
  sys.dict = make_rbf_dictionary(schema, MatrixXd(), VectorXd(), true);

  MatrixXd B(n, r);
  B << sys.B_p, (input_in_plant ? sys.B_g : MatrixXd::Zero(n - m, r));
  SnapshotDataset& ds = sys.dataset;
  ds.plant_id = "synthetic";
  ds.dt = 0.01;
  ds.dict_hash = sys.dict.hash();
  ds.x0 = randn(n, samples);
  ds.u = randn(r, samples);
  ds.x1 = sys.A * ds.x0 + B * ds.u;
  ds.z0 = ds.x0;
  ds.z1 = ds.x1;
  ds.traj_index.assign(samples, 0);
  ds.empty_flag = false;
  return sys;
}

}  // namespace

TEST_CASE("build_Bp discretizes the actuator channels exactly") {
  ActuatorSpec vel{ActuatorSpec::Kind::VelocityIntegrator, 2, 1.0};
  const MatrixXd Bv = build_Bp(vel, 0.1);
  CHECK(Bv.rows() == 2);
  CHECK(Bv.cols() == 2);
  CHECK((Bv - 0.1 * MatrixXd::Identity(2, 2)).norm() == 0.0);

  ActuatorSpec torq{ActuatorSpec::Kind::TorqueDoubleIntegrator, 3, 2e-4};
  const MatrixXd Bt = build_Bp(torq, 0.01);
  CHECK(Bt.rows() == 6);
  CHECK(Bt.cols() == 3);
  // [psi rows; psid rows] per channel
  CHECK(Bt(0, 0) == doctest::Approx(0.5 * 0.01 * 0.01 / 2e-4));
  CHECK(Bt(3, 0) == doctest::Approx(0.01 / 2e-4));
  CHECK(Bt(0, 1) == 0.0);
  CHECK(Bt(4, 1) == doctest::Approx(0.01 / 2e-4));
}

TEST_CASE("autonomous fit plus analytic compensation recovers the operators") {
  SyntheticSystem sys = make_synthetic(16, 3, 2, 3000, 42, /*input_in_plant=*/false);
  FitReport report;
  const MatrixXd A = fit_A_autonomous(sys.dataset, sys.dict, sys.B_p, 1e-12, &report);
  CHECK((A - sys.A).cwiseAbs().maxCoeff() < 1e-8);
  const MatrixXd B_g = build_Bg(A, sys.B_p);
  CHECK((B_g - sys.B_g).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(report.train_rmse < 1e-8);
}

TEST_CASE("joint fit recovers the operators with B_p pinned") {
  SyntheticSystem sys = make_synthetic(16, 3, 2, 3000, 43);
  MatrixXd A, B_g;
  fit_joint(sys.dataset, sys.B_p, 1e-12, A, B_g);
  CHECK((A - sys.A).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((B_g - sys.B_g).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dmdc recovers an unstructured linear system") {
  SyntheticSystem sys = make_synthetic(16, 3, 2, 3000, 44);
  const LinearModel m = fit_dmdc(sys.dataset, 1e-12);
  CHECK((m.A - sys.A).cwiseAbs().maxCoeff() < 1e-8);
  MatrixXd B(16, 2);
  B << sys.B_p, sys.B_g;
  CHECK((m.B - B).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(m.c.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit rejects input-free data for the joint problem") {
  SyntheticSystem sys = make_synthetic(8, 2, 1, 500, 45);
  sys.dataset.u.setZero();
  sys.dataset.x1 = sys.A * sys.dataset.x0;
  sys.dataset.z1 = sys.dataset.x1;
  MatrixXd A, B_g;
  CHECK_THROWS(fit_joint(sys.dataset, sys.B_p, 1e-12, A, B_g));
}

TEST_CASE("local linearization is exact on a linear plant") {
  const int n = 4;
  MatrixXd Ac(n, n);
  Ac << 0, 1, 0, 0,
        -2, -0.3, 0.5, 0,
        0, 0, 0, 1,
        0.4, 0, -1.5, -0.2;
  MatrixXd Bc(n, 1);
  Bc << 0, 1, 0, 0.3;
  ContinuousDynamics dyn;
  dyn.state_dim = n;
  dyn.input_dim = 1;
  dyn.derivative = [Ac, Bc](const VectorXd& x, const VectorXd& u, double) {
    return VectorXd(Ac * x + Bc * u);
  };
  VectorXd x0(n);
  x0 << 0.2, -0.1, 0.4, 0.0;
  const VectorXd u0 = VectorXd::Constant(1, 0.7);
  const LinearModel m = local_linearize(dyn, x0, u0, 0.01, 1e-4);
  // one discrete step must reproduce the true flow from a nearby state
  VectorXd x = x0;
  x[1] += 0.01;
  VectorXd xt = x;
  for (int k = 0; k < 100; ++k) xt = integrate_step(dyn, xt, u0, 0.0, 1e-4);
  const VectorXd xp = m.A * x + m.B * u0 + m.c;
  CHECK((xp - xt).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("predict rolls the affine model forward") {
  MatrixXd A(2, 2);
  A << 1.0, 0.1, 0.0, 1.0;
  MatrixXd B(2, 1);
  B << 0.0, 0.1;
  VectorXd c = VectorXd::Zero(2);
  VectorXd z0(2);
  z0 << 1.0, 0.0;
  MatrixXd useq = MatrixXd::Ones(1, 3);
  const MatrixXd Z = predict(A, B, c, z0, useq);
  CHECK(Z.cols() == 4);
  CHECK((Z.col(0) - z0).norm() == 0.0);
  CHECK((Z.col(1) - (A * z0 + B.col(0))).norm() == 0.0);
  CHECK((Z.col(3) - (A * Z.col(2) + B.col(0))).norm() == 0.0);
}

TEST_CASE("ill-conditioned regression throws instead of returning garbage") {
  SyntheticSystem sys = make_synthetic(8, 2, 1, 500, 46);
  // duplicate one coordinate to make the Gram matrix numerically singular
  sys.dataset.z0.row(7) = sys.dataset.z0.row(6);
  sys.dataset.z1.row(7) = sys.dataset.z1.row(6);
  sys.dataset.x0 = sys.dataset.z0;
  sys.dataset.x1 = sys.dataset.z1;
  CHECK_THROWS_AS(fit_A_autonomous(sys.dataset, sys.dict, sys.B_p, 0.0, nullptr),
                  IllConditionedFitError);
}

TEST_CASE("model save/load round-trips bit for bit") {
  SyntheticSystem sys = make_synthetic(10, 2, 2, 800, 47, /*input_in_plant=*/false);
  CckModel m;
  m.A = fit_A_autonomous(sys.dataset, sys.dict, sys.B_p, 1e-12, nullptr);
  m.B_p = sys.B_p;
  m.B_g = build_Bg(m.A, m.B_p);
  m.dict = sys.dict;
  m.dt = 0.01;
  const std::string path = "model_roundtrip_test.bin";
  save_cck_model(path, m);
  const CckModel r = load_cck_model(path);
  std::remove(path.c_str());
  CHECK((r.A - m.A).norm() == 0.0);
  CHECK((r.B_p - m.B_p).norm() == 0.0);
  CHECK((r.B_g - m.B_g).norm() == 0.0);
  CHECK(r.dt == m.dt);
  CHECK(r.dict.hash() == m.dict.hash());
  // stacked B and the no-compensation ablation
  CHECK((m.B().topRows(2) - m.B_p).norm() == 0.0);
  CHECK(m.without_compensation().B_g.norm() == 0.0);
  CHECK((m.without_compensation().A - m.A).norm() == 0.0);
}

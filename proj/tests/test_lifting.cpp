#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cck/lifting.hpp"

using namespace cck;

namespace {

PlantSchema toy_schema() {
  PlantSchema s;
  s.id = "toy";
  s.state_dim = 4;
  s.input_dim = 1;
  s.actuator_idx = {0};
  s.plant_idx = {2, 3};
  s.rbf_features = {Feature::linear(2), Feature::sine(3)};
  s.state_names = {"p", "a", "q1", "q2"};
  return s;
}

Dictionary toy_dictionary(int n_centers = 3) {
  MatrixXd centers(2, n_centers);
  for (int c = 0; c < n_centers; ++c) centers.col(c) << 0.3 * c, -0.2 * c;
  VectorXd widths(2);
  widths << 0.5, 0.8;
  return make_rbf_dictionary(toy_schema(), centers, widths, true);
}

}  // namespace

TEST_CASE("feature kinds evaluate sparse linear combinations") {
  VectorXd x(3);
  x << 0.4, -1.2, 0.9;
  CHECK(Feature::linear(1).eval(x) == doctest::Approx(-1.2));
  CHECK(Feature::diff(0, 2).eval(x) == doctest::Approx(0.4 - 0.9));
  CHECK(Feature::sine(2).eval(x) == doctest::Approx(std::sin(0.9)));
  CHECK(Feature::cosine(0).eval(x) == doctest::Approx(std::cos(0.4)));
}

TEST_CASE("lift lays out actuator, plant block, then rbf values") {
  Dictionary dict = toy_dictionary();
  CHECK(dict.lifted_dim() == 1 + 2 + 3);
  VectorXd x(4);
  x << 0.7, 0.1, -0.3, 1.1;
  const VectorXd z = dict.lift(x);
  CHECK(z[0] == doctest::Approx(0.7));
  CHECK(z[1] == doctest::Approx(-0.3));
  CHECK(z[2] == doctest::Approx(1.1));
  for (int k = 3; k < 6; ++k) {
    CHECK(z[k] > 0.0);
    CHECK(z[k] <= 1.0);
  }
  // RBF value at its own center is exactly 1
  VectorXd at_center(4);
  at_center << 0.0, 0.0, 0.0, 0.0;  // features (q1, sin q2) = (0, 0) = center 0
  CHECK(dict.lift(at_center)[3] == doctest::Approx(1.0));
}

TEST_CASE("relative actuator coordinates subtract the offset state") {
  PlantSchema s = toy_schema();
  s.actuator_offset_idx = {2};
  Dictionary dict = make_rbf_dictionary(s, MatrixXd(), VectorXd(), true);
  VectorXd x(4);
  x << 0.7, 0.0, 0.2, 0.0;
  CHECK(dict.lift(x)[0] == doctest::Approx(0.5));
  // lift_with_actuator is the inverse map on the actuator block
  const VectorXd z = dict.lift_with_actuator(x, VectorXd::Constant(1, 0.5));
  CHECK(z == dict.lift(x));
}

TEST_CASE("dictionary validation rejects malformed inputs") {
  PlantSchema s = toy_schema();
  MatrixXd centers(2, 2);
  centers << 0.1, 0.1, 0.2, 0.2;  // duplicate columns
  VectorXd widths = VectorXd::Constant(2, 0.5);
  CHECK_THROWS(make_rbf_dictionary(s, centers, widths, true));

  centers.col(1) << 0.4, 0.5;
  VectorXd bad_widths(2);
  bad_widths << 0.5, 0.0;
  CHECK_THROWS(make_rbf_dictionary(s, centers, bad_widths, true));

  MatrixXd wrong_dim(3, 2);
  wrong_dim.setRandom();
  CHECK_THROWS(make_rbf_dictionary(s, wrong_dim, VectorXd::Constant(3, 0.5), true));
}

TEST_CASE("dictionary hash tracks defining content") {
  Dictionary a = toy_dictionary();
  Dictionary b = toy_dictionary();
  CHECK(a.hash() == b.hash());
  b.centers(0, 0) += 1e-9;
  CHECK(a.hash() != b.hash());
  Dictionary c = toy_dictionary();
  c.schema.actuator_offset_idx = {2};
  CHECK(a.hash() != c.hash());
}

TEST_CASE("latin hypercube stratifies every dimension") {
  VectorXd lo(2), hi(2);
  lo << -1.0, 2.0;
  hi << 1.0, 5.0;
  const int n = 40;
  const MatrixXd pts = latin_hypercube(lo, hi, n, 7);
  for (int d = 0; d < 2; ++d) {
    std::vector<bool> bin(n, false);
    for (int i = 0; i < n; ++i) {
      CHECK(pts(d, i) >= lo[d]);
      CHECK(pts(d, i) <= hi[d]);
      const int b = std::min(n - 1, static_cast<int>(n * (pts(d, i) - lo[d]) /
                                                     (hi[d] - lo[d])));
      bin[b] = true;
    }
    for (int b = 0; b < n; ++b) CHECK(bin[b]);  // one sample per stratum
  }
  CHECK(latin_hypercube(lo, hi, n, 7) == pts);  // seeded determinism
}

TEST_CASE("centers_from_data picks data points with positive widths") {
  MatrixXd samples(2, 200);
  for (int i = 0; i < 200; ++i) samples.col(i) << std::sin(0.1 * i), std::cos(0.07 * i);
  MatrixXd centers;
  VectorXd widths;
  centers_from_data(samples, 20, 3, 2.0, centers, widths);
  CHECK(centers.cols() == 20);
  CHECK((widths.array() > 0.0).all());
  // every center is one of the pilot samples
  for (int c = 0; c < centers.cols(); ++c) {
    double best = 1e9;
    for (int i = 0; i < samples.cols(); ++i) {
      best = std::min(best, (centers.col(c) - samples.col(i)).norm());
    }
    CHECK(best < 1e-12);
  }
  CHECK_THROWS(centers_from_data(samples, 500, 3, 2.0, centers, widths));
}

TEST_CASE("generate_dataset records aligned snapshot pairs deterministically") {
  // simple controlled system: p integrates u, q relaxes toward p
  ContinuousDynamics dyn;
  dyn.state_dim = 4;
  dyn.input_dim = 1;
  dyn.derivative = [](const VectorXd& x, const VectorXd& u, double) {
    VectorXd d(4);
    d << u[0], 0.0, x[0] - x[2], -x[3];
    return d;
  };
  ExcitationPolicy pol;
  pol.initial_state = [](std::uint64_t seed) {
    VectorXd x = VectorXd::Zero(4);
    x[2] = 0.01 * static_cast<double>(seed % 17);
    return x;
  };
  pol.make_controller = [](std::uint64_t seed) {
    return Controller([seed](const VectorXd&, double t) {
      return VectorXd::Constant(1, std::sin(t + static_cast<double>(seed % 5)));
    });
  };
  Dictionary dict = toy_dictionary();
  DatasetOptions opt;
  opt.n_traj = 3;
  opt.duration = 0.5;
  opt.dt = 0.01;
  opt.sim_step = 1e-3;
  opt.seed = 11;
  SnapshotDataset ds = generate_dataset(dyn, pol, dict, nullptr, opt);
  CHECK(ds.count() == 150);
  CHECK(!ds.empty_flag);
  CHECK(ds.z0.rows() == dict.lifted_dim());
  // columns are consecutive lifted states of the same trajectory
  for (long k = 0; k + 1 < ds.count(); ++k) {
    if (ds.traj_index[k] != ds.traj_index[k + 1]) continue;
    CHECK((ds.z1.col(k) - ds.z0.col(k + 1)).norm() == 0.0);
    CHECK((ds.x1.col(k) - ds.x0.col(k + 1)).norm() == 0.0);
  }
  // lifted columns match re-lifting the raw states
  CHECK((ds.z0.col(7) - dict.lift(ds.x0.col(7))).norm() == 0.0);
  SnapshotDataset ds2 = generate_dataset(dyn, pol, dict, nullptr, opt);
  CHECK((ds.z1 - ds2.z1).norm() == 0.0);
}

TEST_CASE("generate_dataset drops aborted trajectories") {
  ContinuousDynamics dyn;
  dyn.state_dim = 4;
  dyn.input_dim = 1;
  dyn.derivative = [](const VectorXd& x, const VectorXd&, double) {
    if (x[2] > 0.1) throw std::runtime_error("blown up");
    VectorXd d = VectorXd::Zero(4);
    d[2] = 1.0;
    return d;
  };
  ExcitationPolicy pol;
  pol.initial_state = [](std::uint64_t seed) {
    VectorXd x = VectorXd::Zero(4);
    if (seed % 2 == 0) x[2] = 0.09;  // these blow up almost immediately
    return x;
  };
  pol.make_controller = [](std::uint64_t) {
    return Controller([](const VectorXd&, double) { return VectorXd::Zero(1); });
  };
  Dictionary dict = toy_dictionary();
  DatasetOptions opt;
  opt.n_traj = 4;
  opt.duration = 0.05;
  opt.dt = 0.01;
  opt.sim_step = 1e-3;
  opt.seed = 1;
  SnapshotDataset ds = generate_dataset(dyn, pol, dict, nullptr, opt);
  CHECK(ds.count() > 0);
  CHECK(ds.count() < 20);  // some trajectories were dropped
  opt.drop_aborted = false;
  SnapshotDataset keep = generate_dataset(dyn, pol, dict, nullptr, opt);
  CHECK(keep.count() > ds.count());
}

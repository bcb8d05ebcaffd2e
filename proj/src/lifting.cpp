#include "cck/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

namespace cck {

double Feature::eval(const VectorXd& x) const {
  double v = 0.0;
  for (const auto& [idx, coef] : terms) v += coef * x[idx];
  switch (kind) {
    case Kind::Linear: return v;
    case Kind::Sin: return std::sin(v);
    case Kind::Cos: return std::cos(v);
  }
  return v;
}

VectorXd Dictionary::features(const VectorXd& x) const {
  VectorXd f(schema.rbf_features.size());
  for (std::size_t j = 0; j < schema.rbf_features.size(); ++j) {
    f[j] = schema.rbf_features[j].eval(x);
  }
  return f;
}

VectorXd Dictionary::lift(const VectorXd& x) const {
  VectorXd z(lifted_dim());
  int k = 0;
  for (std::size_t i = 0; i < schema.actuator_idx.size(); ++i) {
    double v = x[schema.actuator_idx[i]];
    if (i < schema.actuator_offset_idx.size() && schema.actuator_offset_idx[i] >= 0) {
      v -= x[schema.actuator_offset_idx[i]];
    }
    z[k++] = v;
  }
  if (include_plant_state) {
    for (int idx : schema.plant_idx) z[k++] = x[idx];
  }
  if (rbf_count() > 0) {
    const VectorXd f = features(x);
    for (int c = 0; c < centers.cols(); ++c) {
      double s = 0.0;
      for (int d = 0; d < f.size(); ++d) {
        const double r = (f[d] - centers(d, c)) / widths[d];
        s += r * r;
      }
      z[k++] = std::exp(-s);
    }
  }
  return z;
}

VectorXd Dictionary::lift_with_actuator(const VectorXd& x, const VectorXd& p_bar) const {
  VectorXd xb = x;
  for (std::size_t i = 0; i < schema.actuator_idx.size(); ++i) {
    double v = p_bar[i];
    if (i < schema.actuator_offset_idx.size() && schema.actuator_offset_idx[i] >= 0) {
      v += x[schema.actuator_offset_idx[i]];
    }
    xb[schema.actuator_idx[i]] = v;
  }
  return lift(xb);
}

std::uint64_t Dictionary::hash() const {
  // FNV-1a over the dictionary's defining bytes.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_int = [&](long v) { mix(&v, sizeof v); };
  mix_int(schema.state_dim);
  mix_int(include_plant_state);
  for (int i : schema.actuator_idx) mix_int(i);
  for (int i : schema.actuator_offset_idx) mix_int(i);
  for (int i : schema.plant_idx) mix_int(i);
  for (const auto& f : schema.rbf_features) {
    mix_int(static_cast<long>(f.kind));
    for (const auto& [idx, coef] : f.terms) {
      mix_int(idx);
      mix(&coef, sizeof coef);
    }
  }
  if (centers.size() > 0) mix(centers.data(), sizeof(double) * centers.size());
  if (widths.size() > 0) mix(widths.data(), sizeof(double) * widths.size());
  return h;
}

Dictionary make_rbf_dictionary(const PlantSchema& schema, const MatrixXd& centers,
                               const VectorXd& widths, bool include_plant_state) {
  if (centers.cols() > 0) {
    if (centers.rows() != static_cast<long>(schema.rbf_features.size())) {
      throw std::invalid_argument("center dimension does not match feature count");
    }
    if (widths.size() != centers.rows() || (widths.array() <= 0.0).any()) {
      throw std::invalid_argument("widths must be positive, one per feature");
    }
    for (int a = 0; a < centers.cols(); ++a) {
      for (int b = a + 1; b < centers.cols(); ++b) {
        if ((centers.col(a) - centers.col(b)).norm() < 1e-12) {
          throw std::invalid_argument("duplicate RBF centers");
        }
      }
    }
  }
  Dictionary dict;
  dict.schema = schema;
  dict.include_plant_state = include_plant_state;
  dict.centers = centers;
  dict.widths = widths;
  return dict;
}

MatrixXd latin_hypercube(const VectorXd& lo, const VectorXd& hi, int n,
                         std::uint64_t seed) {
  const int d = static_cast<int>(lo.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  MatrixXd pts(d, n);
  std::vector<int> perm(n);
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) {
      const double u = (perm[i] + unif(rng)) / n;
      pts(k, i) = lo[k] + u * (hi[k] - lo[k]);
    }
  }
  return pts;
}

void centers_from_data(const MatrixXd& samples, int n, std::uint64_t seed,
                       double width_scale, MatrixXd& centers, VectorXd& widths) {
  if (samples.cols() < n) throw std::invalid_argument("not enough pilot samples");
  std::mt19937_64 rng(seed);
  std::vector<long> idx(samples.cols());
  for (long i = 0; i < samples.cols(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  centers.resize(samples.rows(), n);
  for (int c = 0; c < n; ++c) centers.col(c) = samples.col(idx[c]);

  // Scale distances per dimension by the data spread so one wide coordinate
  // does not dominate the nearest-neighbor metric.
  VectorXd span = samples.rowwise().maxCoeff() - samples.rowwise().minCoeff();
  for (int d = 0; d < span.size(); ++d) span[d] = std::max(span[d], 1e-9);

  std::vector<double> nn(n);
  for (int a = 0; a < n; ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const double dist = ((centers.col(a) - centers.col(b)).array() / span.array())
                              .matrix().norm();
      best = std::min(best, dist);
    }
    nn[a] = best;
  }
  std::nth_element(nn.begin(), nn.begin() + n / 2, nn.end());
  const double med = nn[n / 2];
  widths = width_scale * med * span;
  for (int d = 0; d < widths.size(); ++d) widths[d] = std::max(widths[d], 1e-6);
}

SnapshotDataset generate_dataset(const ContinuousDynamics& dyn,
                                 const ExcitationPolicy& policy,
                                 const Dictionary& dict,
                                 const ContactCounter& modes,
                                 const DatasetOptions& opt) {
  SnapshotDataset ds;
  ds.plant_id = dict.schema.id;
  ds.dt = opt.dt;
  ds.dict_hash = dict.hash();
  ds.seed = opt.seed;
  if (opt.duration <= 0.0 || opt.n_traj <= 0) return ds;

  const long snaps_per = std::lround(opt.duration / opt.dt);
  const long stride = std::lround(opt.dt / opt.sim_step);
  if (stride < 1 || std::abs(stride * opt.sim_step - opt.dt) > 1e-12) {
    throw std::invalid_argument("dt must be an integer multiple of sim_step");
  }

  const long total = snaps_per * opt.n_traj;
  ds.x0.resize(dyn.state_dim, total);
  ds.x1.resize(dyn.state_dim, total);
  ds.u.resize(dyn.input_dim, total);
  ds.z0.resize(dict.lifted_dim(), total);
  ds.z1.resize(dict.lifted_dim(), total);
  ds.traj_index.resize(total);

  long col = 0;
  for (int tr = 0; tr < opt.n_traj; ++tr) {
    const std::uint64_t tseed = opt.seed * 1000003ull + tr;
    SimulateOptions sopt;
    sopt.duration = opt.duration;
    sopt.step = opt.sim_step;
    sopt.control_period = opt.dt;
    sopt.record_stride = static_cast<int>(stride);
    Trajectory traj = simulate(dyn, policy.initial_state(tseed),
                               policy.make_controller(tseed), sopt);
    if (traj.aborted && opt.drop_aborted) continue;
    const long n = static_cast<long>(traj.inputs.size());
    for (long k = 0; k < n; ++k) {
      ds.x0.col(col) = traj.states[k];
      ds.x1.col(col) = traj.states[k + 1];
      ds.u.col(col) = traj.inputs[k];
      ds.z0.col(col) = dict.lift(traj.states[k]);
      ds.z1.col(col) = dict.lift(traj.states[k + 1]);
      ds.traj_index[col] = tr;
      if (modes) ds.mode_histogram[modes(traj.states[k])]++;
      ++col;
    }
  }
  ds.x0.conservativeResize(Eigen::NoChange, col);
  ds.x1.conservativeResize(Eigen::NoChange, col);
  ds.u.conservativeResize(Eigen::NoChange, col);
  ds.z0.conservativeResize(Eigen::NoChange, col);
  ds.z1.conservativeResize(Eigen::NoChange, col);
  ds.traj_index.resize(col);
  ds.empty_flag = (col == 0);
  return ds;
}

}  // namespace cck

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cck/integrator.hpp"

namespace cck {

/// Scalar feature feeding the RBF block: kind applied to a sparse linear
/// combination of state coordinates. Linear combinations allow relative
/// coordinates (e.g. pusher minus slider), Sin/Cos wrap angles.
struct Feature {
  enum class Kind { Linear, Sin, Cos };
  Kind kind = Kind::Linear;
  std::vector<std::pair<int, double>> terms;  // (state index, coefficient)

  double eval(const VectorXd& x) const;
  static Feature linear(int idx) { return {Kind::Linear, {{idx, 1.0}}}; }
  static Feature diff(int a, int b) { return {Kind::Linear, {{a, 1.0}, {b, -1.0}}}; }
  static Feature sine(int idx) { return {Kind::Sin, {{idx, 1.0}}}; }
  static Feature cosine(int idx) { return {Kind::Cos, {{idx, 1.0}}}; }
};

/// Which full-state coordinates play the actuator and plant roles, and what
/// the RBF observables see. plant_idx may omit coordinates (e.g. slider x, y)
/// whose references are handled by velocity integration in the controller.
struct PlantSchema {
  std::string id;
  int state_dim = 0;
  int input_dim = 0;
  std::vector<int> actuator_idx;
  // Optional per-actuator offset: actuator coordinate i enters the lifted
  // state as x[actuator_idx[i]] - x[actuator_offset_idx[i]]. Relative
  // coordinates keep the lifted dynamics translation invariant while the
  // actuator block stays an invertible function of the actuator state.
  // Empty means absolute coordinates; -1 disables the offset per entry.
  std::vector<int> actuator_offset_idx;
  std::vector<int> plant_idx;
  std::vector<Feature> rbf_features;
  std::vector<std::string> state_names;
};

/// Observable dictionary: z = [p; q; rbf block]. The first m coordinates are
/// exactly the actuator state.
struct Dictionary {
  PlantSchema schema;
  bool include_plant_state = true;
  MatrixXd centers;   // feature_dim x n_centers
  VectorXd widths;    // per feature dimension, > 0

  int actuator_dim() const { return static_cast<int>(schema.actuator_idx.size()); }
  int plant_block_dim() const {
    return include_plant_state ? static_cast<int>(schema.plant_idx.size()) : 0;
  }
  int rbf_count() const { return static_cast<int>(centers.cols()); }
  int lifted_dim() const { return actuator_dim() + plant_block_dim() + rbf_count(); }

  VectorXd features(const VectorXd& x) const;
  VectorXd lift(const VectorXd& x) const;
  /// Lift with the actuator coordinates of x replaced by p_bar.
  VectorXd lift_with_actuator(const VectorXd& x, const VectorXd& p_bar) const;

  std::uint64_t hash() const;
};

/// Gaussian RBF dictionary. Throws on duplicate centers or nonpositive widths.
Dictionary make_rbf_dictionary(const PlantSchema& schema, const MatrixXd& centers,
                               const VectorXd& widths, bool include_plant_state);

/// Latin hypercube sample of n points inside [lo, hi] per feature dimension.
MatrixXd latin_hypercube(const VectorXd& lo, const VectorXd& hi, int n,
                         std::uint64_t seed);

/// Center placement from pilot data: draws n feature vectors of visited
/// states and returns widths = scale * median nearest-neighbor distance
/// per dimension (floored at a fraction of the data range).
void centers_from_data(const MatrixXd& feature_samples, int n, std::uint64_t seed,
                       double width_scale, MatrixXd& centers, VectorXd& widths);

struct SnapshotDataset {
  std::string plant_id;
  double dt = 0.0;            // model timestep Delta_k
  std::uint64_t dict_hash = 0;
  std::uint64_t seed = 0;
  bool empty_flag = true;
  MatrixXd x0, x1;            // raw states, one column per snapshot
  MatrixXd u;                 // inputs
  MatrixXd z0, z1;            // lifted states
  std::vector<int> traj_index;            // trajectory of origin, per column
  std::map<int, long> mode_histogram;     // contact mode -> sample count

  long count() const { return z0.cols(); }
};

struct ExcitationPolicy {
  std::function<VectorXd(std::uint64_t)> initial_state;     // per-trajectory seed
  std::function<Controller(std::uint64_t)> make_controller; // per-trajectory seed
};

struct DatasetOptions {
  int n_traj = 10;
  double duration = 4.0;
  double dt = 0.01;        // snapshot spacing, multiple of sim_step
  double sim_step = 1e-4;
  std::uint64_t seed = 0;
  // Drop trajectories that end in a plant failure (barrier saturation under
  // aggressive excitation); their tail states sit far off the usable manifold.
  bool drop_aborted = true;
};

SnapshotDataset generate_dataset(const ContinuousDynamics& dyn,
                                 const ExcitationPolicy& policy,
                                 const Dictionary& dict,
                                 const ContactCounter& modes,
                                 const DatasetOptions& opt);

}  // namespace cck

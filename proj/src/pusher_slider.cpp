#include "cck/pusher_slider.hpp"

#include <cmath>

namespace cck {

using namespace pusher_idx;

Eigen::Vector2d local_coords_square(const VectorXd& state) {
  const double th = state[kTheta];
  const double c = std::cos(th), s = std::sin(th);
  const double rx = state[kPx] - state[kX];
  const double ry = state[kPy] - state[kY];
  return {c * rx + s * ry, -s * rx + c * ry};
}

namespace {

// Returns penetration depth and, when positive, the world-frame contact
// normal (direction the slider is pushed along).
double contact_geometry(const VectorXd& state, const SliderParams& sp,
                        Eigen::Vector2d& normal) {
  if (sp.shape == SliderShape::Square) {
    const Eigen::Vector2d p = local_coords_square(state);
    const double depth = p[0] + 0.5 * sp.side;
    // Only the -x body face takes contact; the pusher must lie on that face.
    if (depth <= 0.0 || p[0] > 0.0 || std::abs(p[1]) > 0.5 * sp.side) return 0.0;
    const double th = state[kTheta];
    normal << std::cos(th), std::sin(th);
    return depth;
  }
  const double rx = state[kPx] - state[kX];
  const double ry = state[kPy] - state[kY];
  const double dist = std::hypot(rx, ry);
  const double depth = sp.radius - dist;
  if (depth <= 0.0 || dist < 1e-12) return 0.0;
  normal << -rx / dist, -ry / dist;  // through the center, away from the pusher
  return depth;
}

}  // namespace

double push_penetration(const VectorXd& state, const SliderParams& sp) {
  Eigen::Vector2d n;
  return contact_geometry(state, sp, n);
}

void push_force(const VectorXd& state, const SliderParams& sp,
                Eigen::Vector2d& force, Eigen::Vector2d& cp) {
  force.setZero();
  cp << state[kPx] - state[kX], state[kPy] - state[kY];
  Eigen::Vector2d normal;
  const double depth = contact_geometry(state, sp, normal);
  if (depth <= 0.0) return;
  double magnitude = sp.k_contact * depth;
  if (sp.c_contact > 0.0) {
    // Penetration rate: the pusher holds its commanded velocity between
    // control updates, so only slider motion enters here.
    const double ddot = normal.dot(Eigen::Vector2d(state[kXd], state[kYd]));
    magnitude = std::max(0.0, magnitude - sp.c_contact * ddot);
  }
  force = magnitude * normal;
}

Eigen::Matrix<double, 6, 1> slider_derivative(const VectorXd& state,
                                              const SliderParams& sp) {
  Eigen::Vector2d f_push, cp;
  push_force(state, sp, f_push, cp);
  const double fx = -sp.damping_t * state[kXd] + f_push[0];
  const double fy = -sp.damping_t * state[kYd] + f_push[1];
  const double m = -sp.damping_r * state[kThetad] + cp[0] * f_push[1] - cp[1] * f_push[0];
  Eigen::Matrix<double, 6, 1> d;
  d << state[kXd], state[kYd], state[kThetad],
       fx / sp.mass, fy / sp.mass, m / sp.inertia;
  return d;
}

VectorXd pusher_system_derivative(const VectorXd& state, const VectorXd& u,
                                  const SliderParams& sp) {
  VectorXd d(kDim);
  d.head<2>() = pusher_derivative(u.head<2>());
  d.tail<6>() = slider_derivative(state, sp);
  return d;
}

int pusher_contact_count(const VectorXd& state, const SliderParams& sp) {
  return push_penetration(state, sp) > 0.0 ? 1 : 0;
}

ContinuousDynamics make_pusher_dynamics(const SliderParams& sp) {
  ContinuousDynamics dyn;
  dyn.state_dim = kDim;
  dyn.input_dim = 2;
  dyn.derivative = [sp](const VectorXd& x, const VectorXd& u, double) {
    return pusher_system_derivative(x, u, sp);
  };
  return dyn;
}

}  // namespace cck

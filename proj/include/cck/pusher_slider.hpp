#pragma once

#include <Eigen/Dense>

#include "cck/integrator.hpp"

namespace cck {

// State layout (8 scalars): actuator first, then plant.
//   [0] x_p [1] y_p   (pusher position)
//   [2] x [3] y [4] theta [5] xd [6] yd [7] thetad   (slider)
namespace pusher_idx {
inline constexpr int kPx = 0, kPy = 1;
inline constexpr int kX = 2, kY = 3, kTheta = 4;
inline constexpr int kXd = 5, kYd = 6, kThetad = 7;
inline constexpr int kDim = 8;
}  // namespace pusher_idx

enum class SliderShape { Square, Circle };

struct SliderParams {
  double mass = 0.5;          // kg
  double inertia = 8e-4;      // kg m^2
  double damping_t = 1.0;     // N s/m, translational floor damping
  double damping_r = 0.01;    // N m s, rotational floor damping
  double k_contact = 1000.0;  // N/m
  double c_contact = 0.0;     // N s/m, optional contact damping (stiffness sweeps)
  SliderShape shape = SliderShape::Square;
  double side = 0.1;          // m, square side L
  double radius = 0.05;       // m, circle radius R
};

/// Pusher position expressed in the slider's body frame.
Eigen::Vector2d local_coords_square(const VectorXd& state);

/// Contact force on the slider (world frame) and the application point
/// relative to the slider's center of mass. Zero outside contact.
/// Square sliders engage the -x body face only; circles engage radially.
void push_force(const VectorXd& state, const SliderParams& sp,
                Eigen::Vector2d& force, Eigen::Vector2d& cp);

/// Pusher-to-slider penetration depth (m), zero when separated. Diagnostic.
double push_penetration(const VectorXd& state, const SliderParams& sp);

/// Slider half of the state derivative: [xd, yd, thetad, xdd, ydd, thetadd].
Eigen::Matrix<double, 6, 1> slider_derivative(const VectorXd& state,
                                              const SliderParams& sp);

/// Velocity-commanded pusher: the input is the pusher velocity.
inline Eigen::Vector2d pusher_derivative(const Eigen::Vector2d& u) { return u; }

VectorXd pusher_system_derivative(const VectorXd& state, const VectorXd& u,
                                  const SliderParams& sp);

/// 1 when the pusher penetrates the slider, else 0.
int pusher_contact_count(const VectorXd& state, const SliderParams& sp);

ContinuousDynamics make_pusher_dynamics(const SliderParams& sp);

}  // namespace cck

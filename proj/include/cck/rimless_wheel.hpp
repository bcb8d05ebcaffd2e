#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>

#include "cck/integrator.hpp"

namespace cck {

// State layout (18 scalars):
//   [0] x  [1] y  [2] theta  [3..8] psi_1..psi_6
//   [9] xd [10] yd [11] thetad [12..17] psid_1..psid_6
namespace wheel_idx {
inline constexpr int kX = 0, kY = 1, kTheta = 2, kPsi0 = 3;
inline constexpr int kXd = 9, kYd = 10, kThetad = 11, kPsid0 = 12;
inline constexpr int kDim = 18;
}  // namespace wheel_idx

struct WheelParams {
  double hub_mass = 5.0;        // kg
  double body_inertia = 0.05;   // kg m^2
  double rotor_inertia = 1e-4;  // kg m^2, gearing reflected to the rotor axis
  double spoke_length = 0.25;   // m, nominal phi_0
  double screw_ratio = 0.01;    // m/rad, phi_i = phi_0 + rho * psi_i
  double phi_min = 0.18;        // m, travel limits; out-of-range clamps and flags
  double phi_max = 0.32;        // m
  double gravity = 9.81;        // m/s^2
  static constexpr int kSpokes = 6;
  static constexpr double kSpacing = M_PI / 3.0;
  static constexpr double kPhase = -M_PI / 2.0;  // spoke 1 points down at theta = 0
};

struct WheelContactParams {
  double k_y = 75.0;      // N, scale of the tan barrier
  double b_y = 2e4;       // N s/m^2, penetration-scaled damping
  double l_max = 0.02;    // m, barrier saturation depth
  double mu = 0.8;        // friction coefficient
  double lambda = 0.01;   // m/s, pseudo-Coulomb smoothing speed
  double floor_y = 0.0;   // m
};

struct BarrierSaturationError : std::runtime_error {
  int spoke;
  double penetration;
  BarrierSaturationError(int i, double d)
      : std::runtime_error("contact penetration reached barrier depth on spoke " +
                           std::to_string(i + 1)),
        spoke(i), penetration(d) {}
};

/// Spoke extension phi_i = phi_0 + rho * psi_i, clamped to travel limits.
/// clamped (optional) reports whether the limit was hit.
double spoke_extension(const WheelParams& wp, double psi, bool* clamped = nullptr);

/// Tip position of spoke i (0-based) and its Jacobian with respect to the
/// nine generalized coordinates (x, y, theta, psi_1..psi_6). Velocity columns
/// of the full-state Jacobian are identically zero and are not stored.
void spoke_tip(const VectorXd& state, const WheelParams& wp, int i,
               Eigen::Vector2d& tip, Eigen::Matrix<double, 2, 9>& jac);

/// Normal reaction: k_y tan(pi d / (2 l_max)) - b_y d ddot, clamped at zero
/// from below (no adhesion). penetration d >= 0 measured into the floor;
/// tip_vy is the world-frame vertical tip velocity.
double normal_force(double penetration, double tip_vy, const WheelContactParams& cp,
                    int spoke = -1);

/// Smoothed Coulomb friction: -(2/pi) atan(vx/lambda) mu F_N.
double friction_force(double tip_vx, double f_normal, const WheelContactParams& cp);

/// Full 18-dim state derivative under spoke torques tau (6-vector).
VectorXd wheel_derivative(const VectorXd& state, const VectorXd& tau,
                          const WheelParams& wp, const WheelContactParams& cp);

/// Number of spokes with positive penetration; pure diagnostic.
int wheel_contact_count(const VectorXd& state, const WheelParams& wp,
                        const WheelContactParams& cp);

/// Kinetic plus gravitational potential energy (spring storage excluded).
double wheel_energy(const VectorXd& state, const WheelParams& wp);

ContinuousDynamics make_wheel_dynamics(const WheelParams& wp,
                                       const WheelContactParams& cp);

/// Symmetric two-spoke stance: spokes 1 and 2 straddle the vertical
/// (theta = pi/6) at the given static penetration. Zero velocities.
VectorXd wheel_two_spoke_stance(const WheelParams& wp, const WheelContactParams& cp,
                                double penetration);

}  // namespace cck

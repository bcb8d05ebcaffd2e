#include "cck/rimless_wheel.hpp"

#include <cmath>

namespace cck {

using namespace wheel_idx;

double spoke_extension(const WheelParams& wp, double psi, bool* clamped) {
  double phi = wp.spoke_length + wp.screw_ratio * psi;
  bool hit = false;
  if (phi < wp.phi_min) { phi = wp.phi_min; hit = true; }
  if (phi > wp.phi_max) { phi = wp.phi_max; hit = true; }
  if (clamped) *clamped = hit;
  return phi;
}

void spoke_tip(const VectorXd& state, const WheelParams& wp, int i,
               Eigen::Vector2d& tip, Eigen::Matrix<double, 2, 9>& jac) {
  const double x = state[kX], y = state[kY], th = state[kTheta];
  const double psi = state[kPsi0 + i];
  bool clamped = false;
  const double phi = spoke_extension(wp, psi, &clamped);
  const double a = th + WheelParams::kPhase + i * WheelParams::kSpacing;
  const double c = std::cos(a), s = std::sin(a);

  tip << x + phi * c, y + phi * s;

  jac.setZero();
  jac(0, 0) = 1.0;
  jac(1, 1) = 1.0;
  jac(0, 2) = -phi * s;
  jac(1, 2) = phi * c;
  if (!clamped) {  // dphi/dpsi = 0 at a travel stop
    jac(0, 3 + i) = wp.screw_ratio * c;
    jac(1, 3 + i) = wp.screw_ratio * s;
  }
}

double normal_force(double penetration, double tip_vy, const WheelContactParams& cp,
                    int spoke) {
  if (penetration <= 0.0) return 0.0;
  if (penetration >= cp.l_max) throw BarrierSaturationError(spoke, penetration);
  const double fn = cp.k_y * std::tan(M_PI * penetration / (2.0 * cp.l_max)) -
                    cp.b_y * penetration * tip_vy;
  return fn > 0.0 ? fn : 0.0;
}

double friction_force(double tip_vx, double f_normal, const WheelContactParams& cp) {
  return -(2.0 / M_PI) * std::atan(tip_vx / cp.lambda) * cp.mu * f_normal;
}

VectorXd wheel_derivative(const VectorXd& state, const VectorXd& tau,
                          const WheelParams& wp, const WheelContactParams& cp) {
  Eigen::Matrix<double, 9, 1> qdot = state.segment<9>(9);
  Eigen::Matrix<double, 9, 1> force;
  force.setZero();
  force[1] -= wp.hub_mass * wp.gravity;
  force.tail<6>() += tau;

  Eigen::Vector2d tip;
  Eigen::Matrix<double, 2, 9> jac;
  for (int i = 0; i < WheelParams::kSpokes; ++i) {
    spoke_tip(state, wp, i, tip, jac);
    const double d = cp.floor_y - tip[1];
    if (d <= 0.0) continue;
    const Eigen::Vector2d tip_v = jac * qdot;
    const double fn = normal_force(d, tip_v[1], cp, i);
    const double ff = friction_force(tip_v[0], fn, cp);
    force += jac.transpose() * Eigen::Vector2d(ff, fn);
  }

  VectorXd deriv(kDim);
  deriv.head<9>() = qdot;
  deriv[9] = force[0] / wp.hub_mass;
  deriv[10] = force[1] / wp.hub_mass;
  deriv[11] = force[2] / wp.body_inertia;
  deriv.tail<6>() = force.tail<6>() / wp.rotor_inertia;
  return deriv;
}

int wheel_contact_count(const VectorXd& state, const WheelParams& wp,
                        const WheelContactParams& cp) {
  int n = 0;
  Eigen::Vector2d tip;
  Eigen::Matrix<double, 2, 9> jac;
  for (int i = 0; i < WheelParams::kSpokes; ++i) {
    spoke_tip(state, wp, i, tip, jac);
    if (tip[1] < cp.floor_y) ++n;
  }
  return n;
}

double wheel_energy(const VectorXd& state, const WheelParams& wp) {
  const double ke = 0.5 * wp.hub_mass * (state[kXd] * state[kXd] + state[kYd] * state[kYd]) +
                    0.5 * wp.body_inertia * state[kThetad] * state[kThetad] +
                    0.5 * wp.rotor_inertia * state.tail<6>().squaredNorm();
  return ke + wp.hub_mass * wp.gravity * state[kY];
}

ContinuousDynamics make_wheel_dynamics(const WheelParams& wp,
                                       const WheelContactParams& cp) {
  ContinuousDynamics dyn;
  dyn.state_dim = kDim;
  dyn.input_dim = WheelParams::kSpokes;
  dyn.derivative = [wp, cp](const VectorXd& x, const VectorXd& u, double) {
    return wheel_derivative(x, u, wp, cp);
  };
  return dyn;
}

VectorXd wheel_two_spoke_stance(const WheelParams& wp, const WheelContactParams& cp,
                                double penetration) {
  VectorXd x = VectorXd::Zero(kDim);
  x[kTheta] = -M_PI / 6.0;  // spokes 1 and 2 straddle the vertical
  x[kY] = cp.floor_y + wp.spoke_length * std::cos(M_PI / 6.0) - penetration;
  return x;
}

}  // namespace cck

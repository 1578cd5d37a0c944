#ifndef AUVRL_VEHICLE_HPP_
#define AUVRL_VEHICLE_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "auvrl/so3.hpp"

namespace auvrl {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kGravity = 9.81;

// Hydrodynamic parameter set of one vehicle instance. Body frame is
// SNAME (x forward, y starboard, z down) with its origin at the centre of
// mass. All units SI.
struct VehicleParams {
  double mass = 13.5;                         // kg
  Mat3 inertia = Mat3::Identity();            // kg m^2 about the CM
  Mat6 added_mass = Mat6::Zero();             // M_A, symmetric
  Vec6 linear_damping = Vec6::Zero();         // N s/m, N m s/rad
  Vec6 quadratic_damping = Vec6::Zero();      // N s^2/m^2, N m s^2/rad^2
  double weight = 13.5 * kGravity;            // N
  double buoyancy = 13.5 * kGravity;          // N
  Vec3 r_cb = Vec3::Zero();                   // CB relative to CM, body, m
  Vec6 thrust_gain = Vec6::Ones();            // N, N m

  // BlueROV2-Heavy-class stand-in. Near-neutral (slightly positive)
  // buoyancy with the CB one centimetre above the CM.
  static VehicleParams Default();

  // Throws InvalidParameters on any violated invariant.
  void Validate() const;
};

struct BodyState {
  Quat q;                          // body relative to NED
  Vec3 v = Vec3::Zero();           // body linear velocity [u, v, w]
  Vec3 omega = Vec3::Zero();       // body angular velocity [p, q, r]
  Vec3 p = Vec3::Zero();           // NED position

  Vec6 nu() const {
    Vec6 out;
    out << v, omega;
    return out;
  }
  bool IsFinite() const;
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  Vec6 AsVector() const {
    Vec6 out;
    out << force, torque;
    return out;
  }
};

struct Actuation {
  Wrench wrench;
  bool saturated = false;
};

// M = M_RB + M_A. Throws InvalidParameters unless the result is symmetric
// positive definite.
Mat6 MassMatrix(const VehicleParams& params);

// C(nu) nu for the skew-symmetric parameterization of C built from M.
// Workless: nu . C(nu) nu == 0 up to rounding.
Vec6 CoriolisWrench(const Mat6& m, const Vec6& nu);

// D(nu) nu with diagonal linear plus quadratic damping.
Vec6 DampingWrench(const VehicleParams& params, const Vec6& nu);

// g(q): hydrostatic term as it appears on the left-hand side of the
// equations of motion. The force acting on the vehicle is -g(q).
Vec6 RestoringWrench(const VehicleParams& params, const Quat& q);

// tau = K a with a clamped to [-1, 1].
Actuation ActuationWrench(const VehicleParams& params, const Vec6& action);

// Gravitational plus buoyancy potential energy, zero for a level vehicle
// at the world origin.
double HydrostaticPotential(const VehicleParams& params, const BodyState& s);

// Parameters plus the factorized mass matrix, built once per episode.
class VehicleModel {
 public:
  VehicleModel() : VehicleModel(VehicleParams::Default()) {}
  explicit VehicleModel(const VehicleParams& params);

  const VehicleParams& params() const { return params_; }
  const Mat6& mass_matrix() const { return mass_; }

  // Solves M x = rhs with the cached Cholesky factor.
  Vec6 Solve(const Vec6& rhs) const { return llt_.solve(rhs); }

  double KineticEnergy(const BodyState& s) const;

 private:
  VehicleParams params_;
  Mat6 mass_;
  Eigen::LLT<Mat6> llt_;
};

struct StepResult {
  BodyState state;
  bool diverged = false;   // non-finite acceleration or state
  bool saturated = false;  // action clamped
};

// One semi-implicit Euler step of
//   M nu_dot + C(nu) nu + D(nu) nu + g(q) = K a.
// The velocity is updated first, then attitude (exact exponential map) and
// position are propagated with the new velocity. dt must lie in (0, 0.05].
StepResult StepDynamics(const BodyState& state, const Vec6& action,
                        const VehicleModel& model, double dt);

}  // namespace auvrl

#endif  // AUVRL_VEHICLE_HPP_

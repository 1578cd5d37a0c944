#include "auvrl/vehicle.hpp"

#include <cmath>
#include <string>

#include "auvrl/errors.hpp"

namespace auvrl {

namespace {

Vec3 Down() { return Vec3(0.0, 0.0, 1.0); }

bool AllFinite(const auto& m) { return m.allFinite(); }

}  // namespace

VehicleParams VehicleParams::Default() {
  VehicleParams p;
  p.mass = 13.5;
  p.inertia = Vec3(0.26, 0.23, 0.37).asDiagonal();
  Vec6 added;
  added << 6.36, 7.12, 18.68, 0.189, 0.135, 0.222;
  p.added_mass = added.asDiagonal();
  p.linear_damping << 4.03, 6.22, 5.18, 0.07, 0.07, 0.07;
  p.quadratic_damping << 18.18, 21.66, 36.99, 1.55, 1.55, 1.55;
  p.weight = p.mass * kGravity;
  p.buoyancy = 134.0;
  p.r_cb = Vec3(0.0, 0.0, -0.01);
  p.thrust_gain << 113.0, 113.0, 160.0, 37.0, 20.0, 28.0;
  return p;
}

void VehicleParams::Validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw InvalidParameters("mass must be positive");
  }
  if (!AllFinite(inertia) || !AllFinite(added_mass) ||
      !AllFinite(linear_damping) || !AllFinite(quadratic_damping) ||
      !AllFinite(r_cb) || !AllFinite(thrust_gain) || !std::isfinite(weight) ||
      !std::isfinite(buoyancy)) {
    throw InvalidParameters("vehicle parameters must be finite");
  }
  const double inertia_scale = inertia.cwiseAbs().maxCoeff() + 1.0;
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * inertia_scale) {
    throw InvalidParameters("inertia tensor must be symmetric");
  }
  if (Eigen::LLT<Mat3>(inertia).info() != Eigen::Success) {
    throw InvalidParameters("inertia tensor must be positive definite");
  }
  const double added_scale = added_mass.cwiseAbs().maxCoeff() + 1.0;
  if ((added_mass - added_mass.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * added_scale) {
    throw InvalidParameters("added mass matrix must be symmetric");
  }
  if ((linear_damping.array() < 0.0).any() ||
      (quadratic_damping.array() < 0.0).any()) {
    throw InvalidParameters("damping coefficients must be non-negative");
  }
  if (!(thrust_gain.array() > 0.0).all()) {
    throw InvalidParameters("thrust gains must be positive");
  }
  if (weight < 0.0 || buoyancy < 0.0) {
    throw InvalidParameters("weight and buoyancy must be non-negative");
  }
}

bool BodyState::IsFinite() const {
  return q.IsFinite() && v.allFinite() && omega.allFinite() && p.allFinite();
}

Mat6 MassMatrix(const VehicleParams& params) {
  params.Validate();
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = params.mass * Mat3::Identity();
  m.bottomRightCorner<3, 3>() = params.inertia;
  m += params.added_mass;
  if (Eigen::LLT<Mat6>(m).info() != Eigen::Success) {
    throw InvalidParameters("mass matrix M_RB + M_A is not positive definite");
  }
  return m;
}

Vec6 CoriolisWrench(const Mat6& m, const Vec6& nu) {
  const Vec3 v = nu.head<3>();
  const Vec3 w = nu.tail<3>();
  const Vec3 p1 = m.topLeftCorner<3, 3>() * v + m.topRightCorner<3, 3>() * w;
  const Vec3 p2 =
      m.bottomLeftCorner<3, 3>() * v + m.bottomRightCorner<3, 3>() * w;
  Vec6 out;
  out.head<3>() = w.cross(p1);
  out.tail<3>() = v.cross(p1) + w.cross(p2);
  return out;
}

Vec6 DampingWrench(const VehicleParams& params, const Vec6& nu) {
  return (params.linear_damping.array() +
          params.quadratic_damping.array() * nu.array().abs()) *
         nu.array();
}

Vec6 RestoringWrench(const VehicleParams& params, const Quat& q) {
  // world "down" expressed in the body frame
  const Vec3 down_b = RotateVector(Conjugate(q), Down());
  const Vec3 f_gravity = params.weight * down_b;
  const Vec3 f_buoyancy = -params.buoyancy * down_b;
  Vec6 g;
  g.head<3>() = -(f_gravity + f_buoyancy);
  g.tail<3>() = -params.r_cb.cross(f_buoyancy);
  return g;
}

Actuation ActuationWrench(const VehicleParams& params, const Vec6& action) {
  Actuation out;
  Vec6 tau;
  for (int i = 0; i < 6; ++i) {
    double a = action[i];
    if (std::isnan(a)) {
      throw InvalidArgument("ActuationWrench: NaN action component");
    }
    if (a > 1.0 || a < -1.0) {
      out.saturated = true;
      a = a > 1.0 ? 1.0 : -1.0;
    }
    tau[i] = params.thrust_gain[i] * a;
  }
  out.wrench.force = tau.head<3>();
  out.wrench.torque = tau.tail<3>();
  return out;
}

double HydrostaticPotential(const VehicleParams& params, const BodyState& s) {
  const Vec3 cb_world = RotateVector(s.q, params.r_cb);
  // NED: height is -z. Gravity pulls the CM down, buoyancy pushes the CB up.
  return (params.buoyancy - params.weight) * s.p.z() +
         params.buoyancy * (cb_world.z() - params.r_cb.z());
}

VehicleModel::VehicleModel(const VehicleParams& params)
    : params_(params), mass_(MassMatrix(params)), llt_(mass_) {}

double VehicleModel::KineticEnergy(const BodyState& s) const {
  const Vec6 nu = s.nu();
  return 0.5 * nu.dot(mass_ * nu);
}

StepResult StepDynamics(const BodyState& state, const Vec6& action,
                        const VehicleModel& model, double dt) {
  if (!(dt > 0.0 && dt <= 0.05)) {
    throw InvalidArgument("StepDynamics: dt must lie in (0, 0.05], got " +
                          std::to_string(dt));
  }
  const VehicleParams& params = model.params();
  const Vec6 nu = state.nu();
  const Actuation act = ActuationWrench(params, action);

  const Vec6 rhs = act.wrench.AsVector() -
                   CoriolisWrench(model.mass_matrix(), nu) -
                   DampingWrench(params, nu) - RestoringWrench(params, state.q);
  const Vec6 nu_dot = model.Solve(rhs);

  StepResult out;
  out.saturated = act.saturated;
  const Vec6 nu_next = nu + nu_dot * dt;
  if (!nu_dot.allFinite() || !nu_next.allFinite()) {
    out.state = state;
    out.diverged = true;
    return out;
  }
  out.state.v = nu_next.head<3>();
  out.state.omega = nu_next.tail<3>();
  out.state.q = IntegrateAttitude(state.q, out.state.omega, dt);
  out.state.p = state.p + RotateVector(out.state.q, out.state.v) * dt;
  out.diverged = !out.state.IsFinite();
  return out;
}

}  // namespace auvrl

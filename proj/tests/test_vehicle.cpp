#include <cmath>
#include <cstring>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "auvrl/errors.hpp"
#include "auvrl/random.hpp"
#include "auvrl/vehicle.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace auvrl {
namespace {

using test::RandomParams;
using test::RandomState;

constexpr double kPi = std::numbers::pi;

Mat3 Skew(const Vec3& a) {
  Mat3 s;
  s << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return s;
}

// Bare rigid body along surge: no added mass, no coupling, W = B, CB = CM.
VehicleParams SurgeParams() {
  VehicleParams p;
  p.mass = 10.0;
  p.inertia = Mat3::Identity();
  p.weight = p.buoyancy = p.mass * kGravity;
  p.linear_damping = Vec6::Constant(1.0);
  p.thrust_gain = Vec6::Constant(100.0);
  return p;
}

double Energy(const VehicleModel& model, const BodyState& s) {
  return model.KineticEnergy(s) + HydrostaticPotential(model.params(), s);
}

TEST_CASE("mass matrix") {
  VehicleParams p;
  p.mass = 7.0;
  p.inertia = Vec3(0.4, 0.5, 0.6).asDiagonal();
  Vec6 expected;
  expected << 7, 7, 7, 0.4, 0.5, 0.6;
  CHECK((MassMatrix(p) - Mat6(expected.asDiagonal())).cwiseAbs().maxCoeff() ==
        0.0);

  const Mat6 m = MassMatrix(VehicleParams::Default());
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Mat6> eig(m);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);

  VehicleParams bad = VehicleParams::Default();
  bad.added_mass(0, 4) = 0.3;
  CHECK_THROWS_AS(MassMatrix(bad), InvalidParameters);

  VehicleParams indefinite = VehicleParams::Default();
  indefinite.added_mass(2, 2) = -100.0;
  CHECK_THROWS_AS(MassMatrix(indefinite), InvalidParameters);

  VehicleParams neg = VehicleParams::Default();
  neg.quadratic_damping[3] = -1.0;
  CHECK_THROWS_AS(neg.Validate(), InvalidParameters);
  VehicleParams zero_gain = VehicleParams::Default();
  zero_gain.thrust_gain[5] = 0.0;
  CHECK_THROWS_AS(zero_gain.Validate(), InvalidParameters);
}

TEST_CASE("coriolis wrench") {
  const Mat6 m = MassMatrix(VehicleParams::Default());
  CHECK(CoriolisWrench(m, Vec6::Zero()).cwiseAbs().maxCoeff() == 0.0);

  // diagonal rigid body: C(nu) nu = [w x m v; v x m v + w x I w]
  VehicleParams p = SurgeParams();
  p.mass = 3.0;
  p.inertia = Vec3(0.2, 0.3, 0.4).asDiagonal();
  Vec6 nu;
  nu << 1, 0, 0, 0, 0, 1;
  const Vec6 c = CoriolisWrench(MassMatrix(p), nu);
  const Vec3 v(1, 0, 0), w(0, 0, 1);
  CHECK((c.head<3>() - w.cross(p.mass * v)).norm() < 1e-15);
  CHECK((c.tail<3>() - w.cross(p.inertia * w)).norm() < 1e-15);
}

TEST_CASE("coriolis matches the explicit skew matrix and does no work") {
  Rng rng = MakeStream(20, 0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Mat6 m = MassMatrix(RandomParams(rng));
    Vec6 nu;
    for (int k = 0; k < 6; ++k) nu[k] = Uniform(rng, -3.0, 3.0);
    const Vec3 v = nu.head<3>(), w = nu.tail<3>();
    const Vec3 p1 = m.topLeftCorner<3, 3>() * v + m.topRightCorner<3, 3>() * w;
    const Vec3 p2 =
        m.bottomLeftCorner<3, 3>() * v + m.bottomRightCorner<3, 3>() * w;
    Mat6 c = Mat6::Zero();
    c.topRightCorner<3, 3>() = -Skew(p1);
    c.bottomLeftCorner<3, 3>() = -Skew(p1);
    c.bottomRightCorner<3, 3>() = -Skew(p2);
    const Vec6 got = CoriolisWrench(m, nu);
    CHECK((got - c * nu).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((c + c.transpose()).cwiseAbs().maxCoeff() == 0.0);
    worst = std::max(worst, std::abs(nu.dot(got)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("damping wrench") {
  VehicleParams p = VehicleParams::Default();
  CHECK(DampingWrench(p, Vec6::Zero()).cwiseAbs().maxCoeff() == 0.0);

  p.linear_damping[0] = 100.0;
  p.quadratic_damping[0] = 0.0;
  Vec6 nu = Vec6::Zero();
  nu[0] = 1.0;
  CHECK(DampingWrench(p, nu)[0] == doctest::Approx(100.0));

  Rng rng = MakeStream(21, 0);
  for (int i = 0; i < 1000; ++i) {
    const VehicleParams r = RandomParams(rng);
    Vec6 x;
    for (int k = 0; k < 6; ++k) x[k] = Uniform(rng, -4.0, 4.0);
    const Vec6 d = DampingWrench(r, x);
    CHECK(x.dot(d) >= 0.0);
    for (int k = 0; k < 6; ++k) {
      const double expected =
          (r.linear_damping[k] + r.quadratic_damping[k] * std::abs(x[k])) * x[k];
      CHECK(std::abs(d[k] - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("restoring wrench") {
  VehicleParams p = SurgeParams();
  p.r_cb = Vec3(0, 0, -0.02);  // CB 2 cm above the CM
  CHECK(RestoringWrench(p, Quat::Identity()).cwiseAbs().maxCoeff() < 1e-12);

  const double roll = 10.0 * kPi / 180.0;
  const Vec6 g = RestoringWrench(p, EulerToQuat(roll, 0, 0));
  const Vec3 applied_torque = -g.tail<3>();
  // lever arm 0.02 m, buoyancy B, tilt 10 degrees, pushing back to level
  CHECK(applied_torque.x() ==
        doctest::Approx(-p.buoyancy * 0.02 * std::sin(roll)).epsilon(1e-12));
  CHECK(std::abs(applied_torque.y()) < 1e-12);
  CHECK(std::abs(applied_torque.z()) < 1e-12);
  CHECK(g.head<3>().norm() < 1e-12);

  Rng rng = MakeStream(22, 0);
  VehicleParams light = VehicleParams::Default();
  REQUIRE(light.buoyancy > light.weight);
  for (int i = 0; i < 200; ++i) {
    const Quat q = UniformRotation(rng);
    const Vec3 world_force =
        RotationMatrix(q) * (-RestoringWrench(light, q).head<3>());
    CHECK((world_force - Vec3(0, 0, -(light.buoyancy - light.weight))).norm() <
          1e-12);
  }
}

TEST_CASE("actuation wrench") {
  VehicleParams p = VehicleParams::Default();
  const Actuation zero = ActuationWrench(p, Vec6::Zero());
  CHECK(zero.wrench.AsVector().cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(zero.saturated);

  p.thrust_gain[0] = 100.0;
  Vec6 a = Vec6::Zero();
  a[0] = 0.5;
  CHECK(ActuationWrench(p, a).wrench.force.x() == doctest::Approx(50.0));

  a[0] = 2.0;
  const Actuation sat = ActuationWrench(p, a);
  CHECK(sat.wrench.force.x() == doctest::Approx(100.0));
  CHECK(sat.saturated);

  a[0] = NAN;
  CHECK_THROWS_AS(ActuationWrench(p, a), InvalidArgument);
}

TEST_CASE("equilibrium is a fixed point") {
  VehicleParams p = SurgeParams();
  p.r_cb = Vec3(0, 0, -0.01);
  const VehicleModel model(p);
  BodyState s;
  s.p = Vec3(1, 2, 3);
  for (int i = 0; i < 500; ++i) {
    const StepResult r = StepDynamics(s, Vec6::Zero(), model, 0.01);
    REQUIRE_FALSE(r.diverged);
    s = r.state;
  }
  CHECK(s.v.norm() == 0.0);
  CHECK(s.omega.norm() == 0.0);
  CHECK((s.p - Vec3(1, 2, 3)).norm() == 0.0);
  CHECK(test::MaxAbsDiff(s.q, Quat::Identity()) < 1e-15);
}

TEST_CASE("terminal surge velocity with linear damping") {
  VehicleParams p = SurgeParams();
  p.linear_damping[0] = 100.0;
  p.thrust_gain[0] = 100.0;
  const VehicleModel model(p);
  Vec6 a = Vec6::Zero();
  a[0] = 1.0;
  BodyState s;
  const double tau = p.mass / p.linear_damping[0];
  const int steps = static_cast<int>(std::round(10.0 * tau / 0.01));
  for (int i = 0; i < steps; ++i) s = StepDynamics(s, a, model, 0.01).state;
  const double terminal = p.thrust_gain[0] / p.linear_damping[0];
  CHECK(std::abs(s.v.x() - terminal) <= 0.01 * terminal);
  CHECK(std::abs(s.v.y()) < 1e-12);
  CHECK(std::abs(s.v.z()) < 1e-12);
  CHECK(s.omega.norm() < 1e-12);
}

TEST_CASE("terminal surge velocity with quadratic damping") {
  VehicleParams p = SurgeParams();
  p.linear_damping[0] = 0.0;
  p.quadratic_damping[0] = 18.18;
  p.thrust_gain[0] = 113.0;
  const VehicleModel model(p);
  Vec6 a = Vec6::Zero();
  a[0] = 1.0;
  BodyState s;
  for (int i = 0; i < 3000; ++i) s = StepDynamics(s, a, model, 0.01).state;
  CHECK(s.v.x() == doctest::Approx(std::sqrt(113.0 / 18.18)).epsilon(1e-6));
}

TEST_CASE("passivity: energy never increases without actuation") {
  Rng rng = MakeStream(23, 0);
  int violations = 0;
  double worst = 0.0;
  for (int draw = 0; draw < 500; ++draw) {
    const VehicleModel model(RandomParams(rng));
    BodyState s = RandomState(rng, 1.0);
    double e = Energy(model, s);
    for (int k = 0; k < 500; ++k) {
      const StepResult r = StepDynamics(s, Vec6::Zero(), model, 0.01);
      REQUIRE_FALSE(r.diverged);
      s = r.state;
      const double next = Energy(model, s);
      const double rise = (next - e) / std::max(std::abs(e), 1e-12);
      worst = std::max(worst, rise);
      if (rise > 1e-6) ++violations;
      e = next;
    }
  }
  INFO("largest relative per-step rise " << worst);
  CHECK(violations == 0);
}

TEST_CASE("semi-implicit Euler converges at first order") {
  Rng rng = MakeStream(24, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const VehicleModel model(RandomParams(rng));
    const BodyState s0 = RandomState(rng, 0.5);
    Vec6 a;
    for (int k = 0; k < 6; ++k) a[k] = Uniform(rng, -0.5, 0.5);

    auto rollout = [&](double dt) {
      BodyState s = s0;
      const int n = static_cast<int>(std::round(5.0 / dt));
      for (int i = 0; i < n; ++i) s = StepDynamics(s, a, model, dt).state;
      return s;
    };
    auto error = [&](const BodyState& x, const BodyState& ref) {
      return (x.nu() - ref.nu()).norm() + (x.p - ref.p).norm() +
             QuatAngle(x.q, ref.q);
    };
    const double dt = 0.02;
    const BodyState ref = rollout(dt / 64);
    const double e1 = error(rollout(dt), ref);
    const double e2 = error(rollout(dt / 2), ref);
    const double e4 = error(rollout(dt / 4), ref);
    INFO("errors " << e1 << " " << e2 << " " << e4);
    // first order against a finite-step reference: e(h) ~ c (h - h_ref)
    const double expected12 = (dt - dt / 64) / (dt / 2 - dt / 64);
    const double expected24 = (dt / 2 - dt / 64) / (dt / 4 - dt / 64);
    CHECK(e1 / e2 == doctest::Approx(expected12).epsilon(0.15));
    CHECK(e2 / e4 == doctest::Approx(expected24).epsilon(0.15));
  }
}

TEST_CASE("step contract") {
  const VehicleModel model;
  Rng rng = MakeStream(25, 0);
  const BodyState s = RandomState(rng, 1.0);
  Vec6 a;
  for (int k = 0; k < 6; ++k) a[k] = Uniform(rng, -1.0, 1.0);
  const StepResult r1 = StepDynamics(s, a, model, 0.01);
  const StepResult r2 = StepDynamics(s, a, model, 0.01);
  CHECK(std::memcmp(&r1.state, &r2.state, sizeof(BodyState)) == 0);
  CHECK(std::abs(r1.state.q.Norm() - 1.0) <= 1e-12);

  CHECK_THROWS_AS(StepDynamics(s, a, model, 0.0), InvalidArgument);
  CHECK_THROWS_AS(StepDynamics(s, a, model, 0.06), InvalidArgument);
  CHECK_NOTHROW(StepDynamics(s, a, model, 0.05));

  BodyState wild = s;
  wild.v = Vec3(1e200, 0, 0);
  const StepResult blown = StepDynamics(wild, a, model, 0.01);
  CHECK(blown.diverged);
}

}  // namespace
}  // namespace auvrl

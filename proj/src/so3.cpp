#include "auvrl/so3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "auvrl/errors.hpp"

namespace auvrl {

double Quat::Norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

bool Quat::IsFinite() const {
  return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) &&
         std::isfinite(z);
}

Quat Normalized(const Quat& q) {
  const double n = q.Norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("cannot normalize a zero or non-finite quaternion");
  }
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

namespace {

Quat RawProduct(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

}  // namespace

Quat HamiltonProduct(const Quat& q1, const Quat& q2) {
  if (!q1.IsFinite() || !q2.IsFinite()) {
    throw InvalidArgument("HamiltonProduct: non-finite quaternion");
  }
  return Normalized(RawProduct(q1, q2));
}

Quat Conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

Quat QuatError(const Quat& q_desired, const Quat& q) {
  Quat e = HamiltonProduct(Conjugate(q_desired), q);
  if (e.w < 0.0) e = -e;
  return e;
}

double QuatAngle(const Quat& q_desired, const Quat& q) {
  // |<q_d, q>| equals |w| of the error quaternion and is symmetric in the
  // arguments by construction.
  const double dot = q_desired.w * q.w + q_desired.x * q.x +
                     q_desired.y * q.y + q_desired.z * q.z;
  const double c = std::clamp(std::abs(dot), 0.0, 1.0);
  return 2.0 * std::acos(c);
}

Quat QuatExp(const Vec3& rotation) {
  const double angle = rotation.norm();
  if (angle < 1e-12) {
    // second-order series keeps the map smooth through zero
    const Quat q{1.0 - angle * angle / 8.0, 0.5 * rotation.x(),
                 0.5 * rotation.y(), 0.5 * rotation.z()};
    return Normalized(q);
  }
  const double half = 0.5 * angle;
  const double s = std::sin(half) / angle;
  return Normalized({std::cos(half), s * rotation.x(), s * rotation.y(),
                     s * rotation.z()});
}

Quat IntegrateAttitude(const Quat& q, const Vec3& omega, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("IntegrateAttitude: dt must be > 0");
  return HamiltonProduct(q, QuatExp(omega * dt));
}

Vec3 RotateVector(const Quat& q, const Vec3& v) {
  const Vec3 u(q.x, q.y, q.z);
  const Vec3 t = 2.0 * u.cross(v);
  return v + q.w * t + u.cross(t);
}

Mat3 RotationMatrix(const Quat& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Quat QuatFromRotationMatrix(const Mat3& r) {
  const double trace = r.trace();
  Quat q;
  if (trace > 0.0) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s,
         (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s,
         (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s,
         (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s,
         (r(1, 2) + r(2, 1)) / s, 0.25 * s};
  }
  if (q.w < 0.0) q = -q;
  return Normalized(q);
}

Quat AxisAngle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw InvalidArgument("AxisAngle: zero axis");
  const double s = std::sin(0.5 * angle) / n;
  return Normalized(
      {std::cos(0.5 * angle), s * axis.x(), s * axis.y(), s * axis.z()});
}

Quat EulerToQuat(double roll, double pitch, double yaw) {
  const double cr = std::cos(0.5 * roll), sr = std::sin(0.5 * roll);
  const double cp = std::cos(0.5 * pitch), sp = std::sin(0.5 * pitch);
  const double cy = std::cos(0.5 * yaw), sy = std::sin(0.5 * yaw);
  return Normalized({cr * cp * cy + sr * sp * sy, sr * cp * cy - cr * sp * sy,
                     cr * sp * cy + sr * cp * sy, cr * cp * sy - sr * sp * cy});
}

EulerAngles QuatToEuler(const Quat& q_in) {
  const Quat q = Normalized(q_in);
  const Mat3 r = RotationMatrix(q);
  EulerAngles e;
  const double cos_pitch = std::hypot(r(2, 1), r(2, 2));
  e.pitch = std::atan2(-r(2, 0), cos_pitch);
  if (std::abs(std::abs(e.pitch) - std::numbers::pi / 2.0) <= 1e-6) {
    e.degenerate = true;
    e.roll = 0.0;
    e.yaw = std::atan2(-r(0, 1), r(1, 1));
    return e;
  }
  e.roll = std::atan2(r(2, 1), r(2, 2));
  e.yaw = std::atan2(r(1, 0), r(0, 0));
  return e;
}

}  // namespace auvrl

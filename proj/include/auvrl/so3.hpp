#ifndef AUVRL_SO3_HPP_
#define AUVRL_SO3_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace auvrl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Unit quaternion, Hamilton convention, scalar first. Represents the
// rotation of the body frame relative to the world (NED) frame, so
// RotateVector(q, v_body) gives v in world coordinates.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quat Identity() { return {}; }
  Vec3 vec() const { return {x, y, z}; }
  double Norm() const;
  bool IsFinite() const;
  Quat operator-() const { return {-w, -x, -y, -z}; }
};

// Roll, pitch, yaw (intrinsic Z-Y-X).
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  // Set when |pitch| is within 1e-6 of pi/2; roll is then forced to 0 and
  // the whole yaw-roll combination is reported in yaw.
  bool degenerate = false;
};

Quat Normalized(const Quat& q);

// q1 ⊗ q2, renormalized. Throws InvalidArgument on non-finite input.
Quat HamiltonProduct(const Quat& q1, const Quat& q2);

Quat Conjugate(const Quat& q);

// conj(q_d) ⊗ q, sign chosen so that w >= 0.
Quat QuatError(const Quat& q_desired, const Quat& q);

// Geodesic angle between two attitudes in [0, pi], 2 acos(|w|) of the error.
double QuatAngle(const Quat& q_desired, const Quat& q);

// Quaternion of the rotation vector `rotation` (axis * angle).
Quat QuatExp(const Vec3& rotation);

// Propagates q under constant body rate omega for dt seconds using the
// exact exponential map: q ⊗ exp(omega * dt / 2).
Quat IntegrateAttitude(const Quat& q, const Vec3& omega, double dt);

// Vector part of q ⊗ (0, v) ⊗ conj(q).
Vec3 RotateVector(const Quat& q, const Vec3& v);

// Body-to-world rotation matrix.
Mat3 RotationMatrix(const Quat& q);

// Quaternion of a proper rotation matrix (columns = body axes in world).
Quat QuatFromRotationMatrix(const Mat3& r);

Quat AxisAngle(const Vec3& axis, double angle);

Quat EulerToQuat(double roll, double pitch, double yaw);
EulerAngles QuatToEuler(const Quat& q);

}  // namespace auvrl

#endif  // AUVRL_SO3_HPP_

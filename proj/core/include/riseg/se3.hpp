#pragma once

#include <Eigen/Core>

namespace riseg::se3 {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rigid transform in SE(3).
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }
  static Pose rot_z(double angle, const Vec3& t = Vec3::Zero());

  Mat4 matrix() const;
  static Pose from_matrix(const Mat4& m);

  Vec3 apply(const Vec3& point) const { return rotation * point + translation; }
  Pose inverse() const;

  /// True when the rotation block is orthonormal with determinant +1.
  bool is_valid(double tol = 1e-9) const;
};

/// a ∘ b: `b` is applied first, then `a` (matrix product a·b).
Pose compose(const Pose& a, const Pose& b);

inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

/// Spatial (or body) twist: angular part first, linear second.
struct Twist {
  Vec3 angular = Vec3::Zero();
  Vec3 linear = Vec3::Zero();

  Eigen::Matrix<double, 6, 1> vector() const;
  bool is_finite() const;
};

struct FrameLimits {
  double area_eps = 1e-8;  // m^2
  double max_span = 0.03;  // d_c, meters
};

/// Builds a frame from three points: origin at p0, x toward p1, z along
/// (p1 - p0) x (p2 - p0), y completing the right-handed triad.
///
/// Throws CollinearTriplet when the triangle area is at most `area_eps` and
/// TripletTooWide when any pairwise distance exceeds `max_span`.
Pose frame_from_triplet(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                        const FrameLimits& limits = {});

enum class TwistMethod {
  /// log(T1 T0^-1) / dt. Exact for constant-twist motion.
  MatrixLog,
  /// Ṫ T^-1 with Ṫ = (T1 - T0)/dt and T taken at the matrix midpoint
  /// (T0 + T1)/2. Second-order accurate; equals the Cayley map of the
  /// displacement.
  FiniteDifference,
  /// Ṫ T^-1 with Ṫ = (T1 - T0)/dt and T = T0. First-order accurate.
  ForwardDifference,
};

/// Twist of the motion frame_t -> frame_t1 expressed in the space frame.
/// Frames rigidly attached to the same body yield the same result.
Twist spatial_twist(const Pose& frame_t, const Pose& frame_t1, double dt,
                    TwistMethod method = TwistMethod::MatrixLog);

/// [w] for w in R^3.
Mat3 skew(const Vec3& w);

/// Matrix exponential of a twist (exponential coordinates).
Pose exp_twist(const Twist& xi);

/// Matrix logarithm of a rigid displacement. Throws RotationNearPi when the
/// rotation angle exceeds pi - 1e-6.
Twist log_pose(const Pose& displacement);

}  // namespace riseg::se3

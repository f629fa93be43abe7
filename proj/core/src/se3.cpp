#include "riseg/se3.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

#include "riseg/errors.hpp"

namespace riseg::se3 {
namespace {

constexpr double kPi = std::numbers::pi;

Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

double orthonormality_error(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).norm();
}

Mat3 reorthonormalize(const Mat3& r) {
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

Twist twist_from_generator(const Mat4& g) {
  const Mat3 a = g.topLeftCorner<3, 3>();
  return {vee(0.5 * (a - a.transpose())), g.topRightCorner<3, 1>()};
}

}  // namespace

Pose Pose::rot_z(double angle, const Vec3& t) {
  Pose p;
  const double c = std::cos(angle), s = std::sin(angle);
  p.rotation << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  p.translation = t;
  return p;
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose Pose::from_matrix(const Mat4& m) {
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

Pose Pose::inverse() const {
  const Mat3 rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

bool Pose::is_valid(double tol) const {
  return rotation.allFinite() && translation.allFinite() &&
         orthonormality_error(rotation) < tol && std::abs(rotation.determinant() - 1.0) < tol;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out{a.rotation * b.rotation, a.rotation * b.translation + a.translation};
  if (orthonormality_error(out.rotation) > 1e-12) out.rotation = reorthonormalize(out.rotation);
  return out;
}

Eigen::Matrix<double, 6, 1> Twist::vector() const {
  Eigen::Matrix<double, 6, 1> v;
  v << angular, linear;
  return v;
}

bool Twist::is_finite() const { return angular.allFinite() && linear.allFinite(); }

Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Pose frame_from_triplet(const Vec3& p0, const Vec3& p1, const Vec3& p2, const FrameLimits& limits) {
  const Vec3 e1 = p1 - p0;
  const Vec3 e2 = p2 - p0;
  const Vec3 normal = e1.cross(e2);
  const double area = 0.5 * normal.norm();
  if (!(area > limits.area_eps)) {
    throw Error(ErrorCode::CollinearTriplet, "triangle area " + std::to_string(area));
  }
  const double span = std::max({e1.norm(), e2.norm(), (p2 - p1).norm()});
  if (span > limits.max_span) {
    throw Error(ErrorCode::TripletTooWide, "span " + std::to_string(span) + " m");
  }
  const Vec3 x = e1.normalized();
  const Vec3 z = normal.normalized();
  const Vec3 y = z.cross(x);
  Pose frame;
  frame.rotation.col(0) = x;
  frame.rotation.col(1) = y;
  frame.rotation.col(2) = z;
  frame.translation = p0;
  return frame;
}

Pose exp_twist(const Twist& xi) {
  const Vec3& w = xi.angular;
  const double theta = w.norm();
  const Mat3 W = skew(w);
  const Mat3 W2 = W * W;
  double a, b, c;  // sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
    c = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  Pose out;
  out.rotation = Mat3::Identity() + a * W + b * W2;
  out.translation = (Mat3::Identity() + b * W + c * W2) * xi.linear;
  return out;
}

Twist log_pose(const Pose& d) {
  const Mat3& r = d.rotation;
  const double cos_theta = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  if (theta > kPi - 1e-6) {
    throw Error(ErrorCode::RotationNearPi, "rotation angle " + std::to_string(theta));
  }
  // theta / sin(theta) and the V^-1 quadratic coefficient
  // (1 - (theta/2) cot(theta/2)) / theta^2.
  double scale, c;
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    scale = 1.0 + t2 / 6.0;
    c = 1.0 / 12.0 + t2 / 720.0;
  } else {
    scale = theta / std::sin(theta);
    const double half = 0.5 * theta;
    c = (1.0 - half / std::tan(half)) / (theta * theta);
  }
  Twist xi;
  xi.angular = 0.5 * scale * vee(r - r.transpose());
  const Mat3 W = skew(xi.angular);
  const Mat3 v_inv = Mat3::Identity() - 0.5 * W + c * W * W;
  xi.linear = v_inv * d.translation;
  return xi;
}

Twist spatial_twist(const Pose& frame_t, const Pose& frame_t1, double dt, TwistMethod method) {
  if (!(dt > 0.0)) throw Error(ErrorCode::DegenerateDt, "dt must be positive");
  if (frame_t.rotation == frame_t1.rotation && frame_t.translation == frame_t1.translation) return {};
  switch (method) {
    case TwistMethod::MatrixLog: {
      Twist xi = log_pose(compose(frame_t1, frame_t.inverse()));
      xi.angular /= dt;
      xi.linear /= dt;
      return xi;
    }
    case TwistMethod::FiniteDifference: {
      const Mat4 t0 = frame_t.matrix();
      const Mat4 t1 = frame_t1.matrix();
      const Mat4 mid = 0.5 * (t0 + t1);
      return twist_from_generator(((t1 - t0) / dt) * mid.inverse());
    }
    case TwistMethod::ForwardDifference: {
      const Mat4 t0 = frame_t.matrix();
      const Mat4 t1 = frame_t1.matrix();
      return twist_from_generator(((t1 - t0) / dt) * frame_t.inverse().matrix());
    }
  }
  return {};
}

}  // namespace riseg::se3

#include "vslam/geometry.hpp"

#include <cmath>

namespace vslam {

void ensure_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + ": non-finite entries");
  }
}

Mat3 skew(const Vec3& w) {
  Mat3 m;
  // clang-format off
  m <<     0.0, -w.z(),  w.y(),
         w.z(),    0.0, -w.x(),
        -w.y(),  w.x(),    0.0;
  // clang-format on
  return m;
}

Vec3 unskew(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

Mat3 projector3(const Vec3& y) {
  const double n = y.norm();
  if (n <= tol::kDegenerateVector) {
    throw DegenerateVector("projector3: direction norm below 1e-12");
  }
  return Mat3::Identity() - y * y.transpose() / (n * n);
}

Mat4 projector4(const Vec4& y) {
  const double n = y.norm();
  if (n <= tol::kDegenerateVector) {
    throw DegenerateVector("projector4: direction norm below 1e-12");
  }
  return Mat4::Identity() - y * y.transpose() / (n * n);
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  ensure_finite(m, "rotation");
  const double orth = (m.transpose() * m - Mat3::Identity()).norm();
  if (orth > tol::kRotationOrthonormality ||
      std::abs(m.determinant() - 1.0) > tol::kRotationOrthonormality) {
    throw ValidationError("rotation: matrix is not in SO(3)");
  }
}

Rotation Rotation::inverse() const {
  return Rotation(m_.transpose().eval());
}

Pose::Pose(Rotation r, Vec3 x) : rotation(r), translation(std::move(x)) {
  ensure_finite(translation, "pose translation");
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation.matrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose Pose::inverse() const {
  const Rotation rt = rotation.inverse();
  return Pose(rt, -(rt * translation));
}

Pose Pose::operator*(const Pose& rhs) const {
  return Pose(rotation * rhs.rotation, rotation * rhs.translation + translation);
}

Twist::Twist(Vec3 omega_in, Vec3 v_in) : omega(std::move(omega_in)), v(std::move(v_in)) {
  ensure_finite(omega, "twist omega");
  ensure_finite(v, "twist v");
}

Mat4 Twist::matrix() const {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = skew(omega);
  m.topRightCorner<3, 1>() = v;
  return m;
}

Rotation exp_so3(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const Mat3 wx = skew(w);
  double a;  // sin(theta)/theta
  double b;  // (1 - cos(theta))/theta^2
  if (theta2 < 1e-8) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Rotation(Mat3::Identity() + a * wx + b * wx * wx);
}

Pose exp_se3(const Twist& u, double dt) {
  const Vec3 w = u.omega * dt;
  const Vec3 v = u.v * dt;
  const double theta2 = w.squaredNorm();
  const Mat3 wx = skew(w);
  double b;  // (1 - cos(theta))/theta^2
  double c;  // (theta - sin(theta))/theta^3
  if (theta2 < 1e-8) {
    b = 0.5 - theta2 / 24.0;
    c = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    const double theta = std::sqrt(theta2);
    b = (1.0 - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  const Mat3 jl = Mat3::Identity() + b * wx + c * wx * wx;
  return Pose(exp_so3(w), jl * v);
}

}  // namespace vslam

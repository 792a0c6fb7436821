#ifndef VSLAM_GEOMETRY_HPP
#define VSLAM_GEOMETRY_HPP

#include <Eigen/Dense>

#include "vslam/errors.hpp"

namespace vslam {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Numerical thresholds shared across the library.
namespace tol {
inline constexpr double kRotationOrthonormality = 1e-9;  // Frobenius bound on RᵀR − I and |det R − 1|
inline constexpr double kUnitNorm = 1e-9;                // unit-vector preconditions
inline constexpr double kDegenerateVector = 1e-12;       // normalisation / projector floor
inline constexpr double kSingularMatrix = 1e-12;         // |det| floor for projective transforms
inline constexpr double kKindThreshold = 1e-12;          // point/bearing split on the 4th coordinate
inline constexpr double kClassEquality = 1e-9;           // default projective class distance
inline constexpr double kDegenerateReference = 1e-9;     // reference-construction direction floor
inline constexpr double kRiccatiMinEig = 1e-12;          // gain blow-up detection
inline constexpr double kRiccatiMaxEig = 1e12;
}  // namespace tol

/// Throws ValidationError if any entry of m is NaN or infinite.
void ensure_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what);

/// Skew-symmetric matrix of w, so that skew(w) * v == w x v for all v.
Mat3 skew(const Vec3& w);

/// Inverse of skew on exactly skew-symmetric input (averages the off-diagonal pairs).
Vec3 unskew(const Mat3& m);

/// Orthogonal projector onto the plane normal to y: I - y yᵀ / |y|².
/// Throws DegenerateVector when |y| <= 1e-12.
Mat3 projector3(const Vec3& y);

/// 4-dimensional analogue of projector3.
Mat4 projector4(const Vec4& y);

/// Rotation matrix with RᵀR = I and det R = +1 enforced at construction (1e-9, Frobenius).
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const;
  Rotation operator*(const Rotation& rhs) const { return Rotation(m_ * rhs.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  Mat3 m_;
};

/// Rigid-body pose (R, x). The 4x4 realisation carries an exact (0,0,0,1) bottom row.
struct Pose {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(Rotation r, Vec3 x);

  static Pose identity() { return Pose(); }

  Mat4 matrix() const;
  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;
};

/// Body velocity (Omega, V) in se(3). The 4x4 realisation has a zero bottom row.
struct Twist {
  Vec3 omega = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  Twist() = default;
  Twist(Vec3 omega_in, Vec3 v_in);

  Mat4 matrix() const;
  Twist operator+(const Twist& rhs) const { return Twist(omega + rhs.omega, v + rhs.v); }
  Twist operator*(double a) const { return Twist(omega * a, v * a); }
};

/// Closed-form Rodrigues exponential so(3) -> SO(3).
Rotation exp_so3(const Vec3& w);

/// Closed-form exponential of U*dt, se(3) -> SE(3).
Pose exp_se3(const Twist& u, double dt);

}  // namespace vslam

#endif  // VSLAM_GEOMETRY_HPP

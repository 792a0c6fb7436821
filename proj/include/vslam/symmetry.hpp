#ifndef VSLAM_SYMMETRY_HPP
#define VSLAM_SYMMETRY_HPP

#include <cstddef>
#include <vector>

#include "vslam/projective.hpp"

namespace vslam {

/// Scaled orthogonal transformation: the block matrix diag(R, a) with a != 0.
/// Acting on RP³ it rotates bearing-type classes and rotate-and-scales
/// point-type classes.
struct ScaledRotation {
  Rotation rotation;
  double scale = 1.0;

  ScaledRotation() = default;
  ScaledRotation(Rotation r, double a);

  static ScaledRotation identity() { return ScaledRotation(); }

  Mat4 matrix() const;
  Mat4 inverse_matrix() const;  // diag(Rᵀ, 1/a)
  ScaledRotation inverse() const;
  ScaledRotation operator*(const ScaledRotation& rhs) const;
};

/// Algebra element of the scaled-rotation group: block matrix diag(w^x, s).
struct ScaledRotationTangent {
  Vec3 w = Vec3::Zero();
  double s = 0.0;

  Mat4 matrix() const;
  ScaledRotationTangent operator+(const ScaledRotationTangent& rhs) const {
    return {w + rhs.w, s + rhs.s};
  }
};

/// Exponential diag(w^x, s)*dt -> diag(exp(w^x dt), e^{s dt}).
ScaledRotation exp_scaled_rotation(const ScaledRotationTangent& t, double dt);

/// Element of the product group SE(3) x (scaled rotations)^n that acts on the
/// total state space. The landmark count n is fixed for the element's lifetime.
struct GroupElement {
  Pose pose;
  std::vector<ScaledRotation> landmarks;

  static GroupElement identity(std::size_t n);

  std::size_t size() const { return landmarks.size(); }
  GroupElement operator*(const GroupElement& rhs) const;  // DimensionMismatch on unequal n
  GroupElement inverse() const;
};

/// Algebra element of the product group: (twist, per-landmark tangents).
struct GroupTangent {
  Twist pose;
  std::vector<ScaledRotationTangent> landmarks;

  std::size_t size() const { return landmarks.size(); }
  GroupTangent operator+(const GroupTangent& rhs) const;
};

/// Componentwise exponential of t*dt on the product group.
GroupElement group_exp(const GroupTangent& t, double dt);

/// Robot pose plus n landmark classes. Point-type landmarks come first
/// (indices [0, point_count)), bearing-type landmarks after. No landmark may
/// coincide with the robot origin (the class of e4 in body coordinates).
class TotalState {
 public:
  /// Infers the point/bearing split from the stored tags; throws
  /// ValidationError if the landmarks are not ordered points-first, and
  /// OriginLandmark if any landmark sits at the robot origin.
  TotalState(Pose p, std::vector<ProjectivePoint> landmarks);

  /// Same checks except the declared split is taken as given; stored tags may
  /// disagree with it. Used where a point-type representative deliberately
  /// occupies a bearing slot.
  static TotalState with_point_count(Pose p, std::vector<ProjectivePoint> landmarks,
                                     std::size_t point_count);

  const Pose& pose() const { return pose_; }
  const std::vector<ProjectivePoint>& landmarks() const { return landmarks_; }
  std::size_t size() const { return landmarks_.size(); }
  std::size_t point_count() const { return point_count_; }
  std::size_t bearing_count() const { return landmarks_.size() - point_count_; }
  Kind layout_kind(std::size_t i) const { return i < point_count_ ? Kind::Point : Kind::Bearing; }

 private:
  TotalState() = default;

  Pose pose_;
  std::vector<ProjectivePoint> landmarks_;
  std::size_t point_count_ = 0;
};

/// Right action of the group on the total state:
/// ((A, Q_i), (P, eta_i)) -> (P A, P A Q_i⁻¹ P⁻¹ eta_i).
TotalState group_action(const GroupElement& x, const TotalState& xi);

/// Per-landmark velocity lift. body_rep is any representative (q, r) of the
/// landmark class in body coordinates; the result is invariant to its scaling.
/// Throws OriginLandmark when |q| <= 1e-12.
ScaledRotationTangent landmark_lift(const Twist& u, const Vec4& body_rep);
ScaledRotationTangent landmark_lift(const Twist& u, const ProjectivePoint& body_landmark);

/// Lift of the body velocity onto the group algebra: (U, W(U, P⁻¹ eta_i)).
/// The induced group flow projects to the system kinematics (pose transport,
/// static landmarks).
GroupTangent velocity_lift(const TotalState& xi, const Twist& u);

}  // namespace vslam

#endif  // VSLAM_SYMMETRY_HPP

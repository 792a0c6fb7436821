#ifndef VSLAM_PROJECTIVE_HPP
#define VSLAM_PROJECTIVE_HPP

#include <variant>

#include "vslam/geometry.hpp"

namespace vslam {

enum class Kind { Point, Bearing };

/// Unsigned direction, an element of RP². Stored as a unit-norm representative;
/// all comparisons are equivalence-class comparisons (up to sign).
class Bearing {
 public:
  explicit Bearing(const Vec3& direction);

  const Vec3& rep() const { return rep_; }

  /// min(|a - b|, |a + b|) on the unit representatives.
  double class_distance(const Bearing& other) const;

  /// Angle between the direction classes, in [0, pi/2].
  double angle_to(const Bearing& other) const;

 private:
  Vec3 rep_;
};

/// Element of RP³ represented by a unit-norm homogeneous 4-vector plus a
/// point/bearing tag. Bearing-type elements have a (near-)zero 4th coordinate;
/// point-type elements do not. Sign of the representative is left free and all
/// public comparisons are class comparisons.
class ProjectivePoint {
 public:
  /// Builds the class of x and derives the tag from the 4th coordinate of the
  /// normalised representative (threshold 1e-12).
  static ProjectivePoint from_homogeneous(const Vec4& x);

  const Vec4& rep() const { return rep_; }
  Kind kind() const { return kind_; }

  double class_distance(const ProjectivePoint& other) const;
  bool same_class(const ProjectivePoint& other, double tolerance = tol::kClassEquality) const;

 private:
  ProjectivePoint(const Vec4& unit_rep, Kind kind) : rep_(unit_rep), kind_(kind) {}

  Vec4 rep_;
  Kind kind_;
};

/// Embeds a position p as the point-type class of (p, 1).
ProjectivePoint embed_point(const Vec3& p);

/// Embeds a unit direction b (|b| = 1 within 1e-9) as the bearing-type class of (b, 0).
ProjectivePoint embed_bearing(const Vec3& b);

/// Recovers the Euclidean position from a point-type element or the unsigned
/// direction from a bearing-type element.
std::variant<Vec3, Bearing> unembed(const ProjectivePoint& x);

/// Point-type only variant of unembed; throws ValidationError on bearing-type input.
Vec3 unembed_point(const ProjectivePoint& x);

/// Bearing-type only variant of unembed; throws ValidationError on point-type input.
Bearing unembed_bearing(const ProjectivePoint& x);

/// Applies a full-rank 4x4 matrix to the class: [x] -> [A x]. The tag of the
/// result is recomputed from the 4th coordinate. Throws SingularMatrix when
/// |det A| <= 1e-12.
ProjectivePoint transform(const Mat4& a, const ProjectivePoint& x);

/// Camera output: the RP² class of the first three components of P⁻¹ applied
/// to the landmark representative. Throws LandmarkAtOrigin when those
/// components vanish (landmark at the camera origin).
Bearing measure(const Pose& p, const ProjectivePoint& landmark);

}  // namespace vslam

#endif  // VSLAM_PROJECTIVE_HPP

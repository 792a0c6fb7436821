#include "vslam/projective.hpp"

#include <algorithm>
#include <cmath>

namespace vslam {

namespace {

Kind kind_of_unit_rep(const Vec4& unit_rep) {
  return std::abs(unit_rep(3)) <= tol::kKindThreshold ? Kind::Bearing : Kind::Point;
}

}  // namespace

Bearing::Bearing(const Vec3& direction) {
  ensure_finite(direction, "bearing");
  const double n = direction.norm();
  if (n <= tol::kDegenerateVector) {
    throw DegenerateVector("bearing: zero direction");
  }
  rep_ = direction / n;
}

double Bearing::class_distance(const Bearing& other) const {
  return std::min((rep_ - other.rep_).norm(), (rep_ + other.rep_).norm());
}

double Bearing::angle_to(const Bearing& other) const {
  return std::acos(std::min(1.0, std::abs(rep_.dot(other.rep_))));
}

ProjectivePoint ProjectivePoint::from_homogeneous(const Vec4& x) {
  ensure_finite(x, "projective point");
  const double n = x.norm();
  if (n <= tol::kDegenerateVector) {
    throw DegenerateVector("projective point: zero representative");
  }
  const Vec4 unit = x / n;
  return ProjectivePoint(unit, kind_of_unit_rep(unit));
}

double ProjectivePoint::class_distance(const ProjectivePoint& other) const {
  return std::min((rep_ - other.rep_).norm(), (rep_ + other.rep_).norm());
}

bool ProjectivePoint::same_class(const ProjectivePoint& other, double tolerance) const {
  return class_distance(other) < tolerance;
}

ProjectivePoint embed_point(const Vec3& p) {
  return ProjectivePoint::from_homogeneous(Vec4(p.x(), p.y(), p.z(), 1.0));
}

ProjectivePoint embed_bearing(const Vec3& b) {
  ensure_finite(b, "bearing direction");
  if (std::abs(b.norm() - 1.0) > tol::kUnitNorm) {
    throw ValidationError("embed_bearing: direction must be unit-norm within 1e-9");
  }
  return ProjectivePoint::from_homogeneous(Vec4(b.x(), b.y(), b.z(), 0.0));
}

std::variant<Vec3, Bearing> unembed(const ProjectivePoint& x) {
  if (x.kind() == Kind::Point) {
    return Vec3(x.rep().head<3>() / x.rep()(3));
  }
  return Bearing(x.rep().head<3>());
}

Vec3 unembed_point(const ProjectivePoint& x) {
  if (x.kind() != Kind::Point) {
    throw ValidationError("unembed_point: bearing-type input");
  }
  return x.rep().head<3>() / x.rep()(3);
}

Bearing unembed_bearing(const ProjectivePoint& x) {
  if (x.kind() != Kind::Bearing) {
    throw ValidationError("unembed_bearing: point-type input");
  }
  return Bearing(x.rep().head<3>());
}

ProjectivePoint transform(const Mat4& a, const ProjectivePoint& x) {
  ensure_finite(a, "projective transform");
  if (std::abs(a.determinant()) <= tol::kSingularMatrix) {
    throw SingularMatrix("transform: matrix is singular");
  }
  return ProjectivePoint::from_homogeneous(a * x.rep());
}

Bearing measure(const Pose& p, const ProjectivePoint& landmark) {
  const Vec4 body = p.inverse().matrix() * landmark.rep();
  const Vec3 direction = body.head<3>();
  if (direction.norm() <= tol::kDegenerateVector) {
    throw LandmarkAtOrigin("measure: landmark at the camera origin");
  }
  return Bearing(direction);
}

}  // namespace vslam

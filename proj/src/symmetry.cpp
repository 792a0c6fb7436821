#include "vslam/symmetry.hpp"

#include <cmath>
#include <utility>

namespace vslam {

namespace {

void check_not_origin(const Mat4& pose_inverse, const ProjectivePoint& landmark, std::size_t i) {
  const Vec4 body = (pose_inverse * landmark.rep()).normalized();
  if (body.head<3>().norm() <= tol::kKindThreshold) {
    throw OriginLandmark("landmark " + std::to_string(i) + " coincides with the robot origin");
  }
}

}  // namespace

ScaledRotation::ScaledRotation(Rotation r, double a) : rotation(r), scale(a) {
  if (!std::isfinite(a) || std::abs(a) <= tol::kDegenerateVector) {
    throw ValidationError("scaled rotation: scale must be finite and non-zero");
  }
}

Mat4 ScaledRotation::matrix() const {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = rotation.matrix();
  m(3, 3) = scale;
  return m;
}

Mat4 ScaledRotation::inverse_matrix() const {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = rotation.matrix().transpose();
  m(3, 3) = 1.0 / scale;
  return m;
}

ScaledRotation ScaledRotation::inverse() const {
  return ScaledRotation(rotation.inverse(), 1.0 / scale);
}

ScaledRotation ScaledRotation::operator*(const ScaledRotation& rhs) const {
  return ScaledRotation(rotation * rhs.rotation, scale * rhs.scale);
}

Mat4 ScaledRotationTangent::matrix() const {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = skew(w);
  m(3, 3) = s;
  return m;
}

ScaledRotation exp_scaled_rotation(const ScaledRotationTangent& t, double dt) {
  return ScaledRotation(exp_so3(t.w * dt), std::exp(t.s * dt));
}

GroupElement GroupElement::identity(std::size_t n) {
  GroupElement x;
  x.landmarks.assign(n, ScaledRotation::identity());
  return x;
}

GroupElement GroupElement::operator*(const GroupElement& rhs) const {
  if (landmarks.size() != rhs.landmarks.size()) {
    throw DimensionMismatch("group compose: unequal landmark counts");
  }
  GroupElement out;
  out.pose = pose * rhs.pose;
  out.landmarks.reserve(landmarks.size());
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    out.landmarks.push_back(landmarks[i] * rhs.landmarks[i]);
  }
  return out;
}

GroupElement GroupElement::inverse() const {
  GroupElement out;
  out.pose = pose.inverse();
  out.landmarks.reserve(landmarks.size());
  for (const auto& q : landmarks) {
    out.landmarks.push_back(q.inverse());
  }
  return out;
}

GroupTangent GroupTangent::operator+(const GroupTangent& rhs) const {
  if (landmarks.size() != rhs.landmarks.size()) {
    throw DimensionMismatch("group tangent sum: unequal landmark counts");
  }
  GroupTangent out;
  out.pose = pose + rhs.pose;
  out.landmarks.reserve(landmarks.size());
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    out.landmarks.push_back(landmarks[i] + rhs.landmarks[i]);
  }
  return out;
}

GroupElement group_exp(const GroupTangent& t, double dt) {
  GroupElement out;
  out.pose = exp_se3(t.pose, dt);
  out.landmarks.reserve(t.landmarks.size());
  for (const auto& w : t.landmarks) {
    out.landmarks.push_back(exp_scaled_rotation(w, dt));
  }
  return out;
}

TotalState::TotalState(Pose p, std::vector<ProjectivePoint> landmarks)
    : pose_(std::move(p)), landmarks_(std::move(landmarks)) {
  std::size_t i = 0;
  while (i < landmarks_.size() && landmarks_[i].kind() == Kind::Point) {
    ++i;
  }
  point_count_ = i;
  for (; i < landmarks_.size(); ++i) {
    if (landmarks_[i].kind() != Kind::Bearing) {
      throw ValidationError("total state: landmarks must be ordered points-first");
    }
  }
  const Mat4 p_inv = pose_.inverse().matrix();
  for (std::size_t j = 0; j < landmarks_.size(); ++j) {
    check_not_origin(p_inv, landmarks_[j], j);
  }
}

TotalState TotalState::with_point_count(Pose p, std::vector<ProjectivePoint> landmarks,
                                        std::size_t point_count) {
  if (point_count > landmarks.size()) {
    throw DimensionMismatch("total state: point count exceeds landmark count");
  }
  TotalState out;
  out.pose_ = std::move(p);
  out.landmarks_ = std::move(landmarks);
  out.point_count_ = point_count;
  const Mat4 p_inv = out.pose_.inverse().matrix();
  for (std::size_t j = 0; j < out.landmarks_.size(); ++j) {
    check_not_origin(p_inv, out.landmarks_[j], j);
  }
  return out;
}

TotalState group_action(const GroupElement& x, const TotalState& xi) {
  if (x.size() != xi.size()) {
    throw DimensionMismatch("group action: unequal landmark counts");
  }
  const Pose new_pose = xi.pose() * x.pose;
  const Mat4 pa = new_pose.matrix();
  const Mat4 p_inv = xi.pose().inverse().matrix();
  std::vector<ProjectivePoint> out;
  out.reserve(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const Mat4 t = pa * x.landmarks[i].inverse_matrix() * p_inv;
    out.push_back(transform(t, xi.landmarks()[i]));
  }
  return TotalState::with_point_count(new_pose, std::move(out), xi.point_count());
}

ScaledRotationTangent landmark_lift(const Twist& u, const Vec4& body_rep) {
  const Vec3 q = body_rep.head<3>();
  const double r = body_rep(3);
  const double q2 = q.squaredNorm();
  if (std::sqrt(q2) <= tol::kDegenerateVector) {
    throw OriginLandmark("landmark lift: body-frame landmark at the origin");
  }
  return {u.omega - r * u.v.cross(q) / q2, -r * u.v.dot(q) / q2};
}

ScaledRotationTangent landmark_lift(const Twist& u, const ProjectivePoint& body_landmark) {
  return landmark_lift(u, body_landmark.rep());
}

GroupTangent velocity_lift(const TotalState& xi, const Twist& u) {
  const Mat4 p_inv = xi.pose().inverse().matrix();
  GroupTangent t;
  t.pose = u;
  t.landmarks.reserve(xi.size());
  for (const auto& landmark : xi.landmarks()) {
    t.landmarks.push_back(landmark_lift(u, Vec4(p_inv * landmark.rep())));
  }
  return t;
}

}  // namespace vslam

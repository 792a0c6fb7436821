#ifndef VSLAM_OBSERVER_HPP
#define VSLAM_OBSERVER_HPP

#include <span>
#include <vector>

#include "vslam/symmetry.hpp"

namespace vslam {

/// Observer gains. k weights every landmark innovation and must exceed 0.5;
/// k_g and k_h are the measurement and excitation weights of the per-landmark
/// Riccati equation; sigma0_scale sets the initial gain matrices to
/// sigma0_scale * I. Invariants are enforced by validate(), which observer and
/// scenario construction call; the fields themselves stay freely assignable so
/// that individual pieces (e.g. riccati_step) can be probed with formal
/// out-of-range values in tests.
struct GainConfig {
  double k = 1.0;
  double k_g = 2.0;
  double k_h = 0.5;
  double sigma0_scale = 25.0;

  void validate() const;
};

/// Correction velocity on the group algebra: a pose twist plus one
/// scaled-rotation tangent per landmark.
struct Innovation {
  Twist pose;
  std::vector<ScaledRotationTangent> landmarks;
};

/// Complete observer state: the group element transporting the fixed reference
/// configuration, the per-point-landmark Riccati gain matrices, the reference
/// itself, and the gains.
struct ObserverState {
  GroupElement group_state;
  std::vector<Mat3> sigma;  // one symmetric positive-definite 3x3 per point landmark
  TotalState reference;
  GainConfig gains;

  /// Starts at the group identity with sigma_i = sigma0_scale * I. Checks that
  /// the stored landmark tags match the reference layout unless
  /// allow_kind_mismatch is set (used when point-type representatives
  /// deliberately occupy bearing slots).
  static ObserverState initialize(TotalState reference, GainConfig gains,
                                  bool allow_kind_mismatch = false);
};

/// The state estimate: the group action applied to the reference configuration.
TotalState estimated_state(const ObserverState& obs);

/// Camera outputs of the estimated state, in landmark order. observer_step
/// uses exactly this code path for its internal predictions.
std::vector<Bearing> predicted_measurements(const ObserverState& obs);

/// The full innovation bundle for the given measurements: per-landmark
/// corrections plus the least-squares pose correction. observer_step applies
/// exactly this bundle.
Innovation compute_innovation(const ObserverState& obs, const std::vector<Bearing>& measurements);

/// Per-landmark innovation from the predicted and measured directions.
/// Point-type landmarks use the gain K = k sigma P_y k_g; bearing-type
/// landmarks use K = k P_y (identity Riccati gains). The result is invariant
/// to sign flips of either direction representative.
ScaledRotationTangent landmark_innovation(const Bearing& predicted, const Bearing& measured,
                                          const Mat3& sigma, const GainConfig& gains, Kind kind);

/// One Euler step of the gain matrix dynamics
///   sigma' = sigma w^x - w^x sigma + k_h I - sigma P_y k_g P_y sigma,
/// followed by symmetrisation. Throws RiccatiBlowup when the stepped matrix
/// leaves [1e-12, 1e12] in eigenvalue, signalling a too-large dt or loss of
/// excitation.
Mat3 riccati_step(const Mat3& sigma, const Vec3& omega, const Bearing& measured,
                  const GainConfig& gains, double dt);

struct PoseInnovation {
  Twist twist;
  int rank = 0;  // numerical rank of the stacked least-squares system (max 6)
};

/// Least-squares pose innovation: minimises the sum of squared residual norms
///   | P̄_theta ( [-q^x, r I; 0, 0] z + D_i theta_i ) / |theta_i| |^2
/// over z = (rotation, translation) in R^6, where theta_i are body-frame
/// landmark representatives (any scale; the cost is scale-invariant) and D_i
/// the landmark innovations. Rank-deficient systems yield the minimum-norm
/// minimiser.
PoseInnovation pose_innovation(std::span<const Vec4> body_landmarks,
                               std::span<const ScaledRotationTangent> landmark_innovations);
PoseInnovation pose_innovation(const std::vector<ProjectivePoint>& body_landmarks,
                               const std::vector<ScaledRotationTangent>& landmark_innovations);

/// Value of the pose-innovation cost at a candidate twist; exposed for tests.
double pose_innovation_cost(std::span<const Vec4> body_landmarks,
                            std::span<const ScaledRotationTangent> landmark_innovations,
                            const Twist& candidate);

/// One observer update: computes the innovation from the measurements, lifts
/// the body velocity, advances the group state by the exponential of
/// (lift + innovation) * dt and the gain matrices by riccati_step. The
/// landmark lift is evaluated at the half-step-transported body landmarks,
/// which keeps the frozen-generator exponential step second-order consistent
/// with the continuous class transport. Pure and deterministic; on
/// RiccatiBlowup the input state is left untouched.
ObserverState observer_step(const ObserverState& obs, const Twist& u,
                            const std::vector<Bearing>& measurements, double dt);

}  // namespace vslam

#endif  // VSLAM_OBSERVER_HPP

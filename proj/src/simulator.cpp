#include "vslam/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace vslam {

namespace {

Rotation rotation_from_rpy(const Vec3& rpy) {
  return exp_so3(Vec3(0, 0, rpy.z())) * exp_so3(Vec3(0, rpy.y(), 0)) *
         exp_so3(Vec3(rpy.x(), 0, 0));
}

bool camera_is_identity(const Mat3& camera) {
  return camera == Mat3::Identity();
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(dt > 0.0)) {
    throw ValidationError("scenario: dt must be positive");
  }
  if (!(duration >= 0.0)) {
    throw ValidationError("scenario: duration must be non-negative");
  }
  if (!(pe_window > 0.0)) {
    throw ValidationError("scenario: pe_window must be positive");
  }
  if (!(epsilon_bound >= 0.0)) {
    throw ValidationError("scenario: epsilon_bound must be non-negative");
  }
  if (landmark_count() == 0) {
    throw ValidationError("scenario: at least one landmark is required");
  }
  ensure_finite(initial_position, "scenario initial_position");
  ensure_finite(initial_rpy, "scenario initial_rpy");
  ensure_finite(angular_velocity, "scenario angular_velocity");
  ensure_finite(linear_velocity, "scenario linear_velocity");
  ensure_finite(camera_matrix, "scenario camera_matrix");
  if (std::abs(camera_matrix.determinant()) <= tol::kSingularMatrix) {
    throw ValidationError("scenario: camera_matrix must be invertible");
  }
  for (const auto& b : bearings) {
    ensure_finite(b, "scenario bearing");
    if (std::abs(b.norm() - 1.0) > tol::kUnitNorm) {
      throw ValidationError("scenario: bearing directions must be unit-norm");
    }
  }
  for (const auto& p : points) {
    ensure_finite(p, "scenario point");
    if ((p - initial_position).norm() <= tol::kDegenerateReference) {
      throw ValidationError("scenario: landmark coincides with the initial camera origin");
    }
  }
  gains.validate();
}

TotalState initial_truth(const ScenarioConfig& cfg) {
  std::vector<ProjectivePoint> landmarks;
  landmarks.reserve(cfg.landmark_count());
  for (const auto& p : cfg.points) {
    landmarks.push_back(embed_point(p));
  }
  for (const auto& b : cfg.bearings) {
    landmarks.push_back(embed_bearing(b));
  }
  return TotalState(Pose(rotation_from_rpy(cfg.initial_rpy), cfg.initial_position),
                    std::move(landmarks));
}

TotalState propagate_truth(const TotalState& xi, const Twist& u, double dt) {
  return TotalState::with_point_count(xi.pose() * exp_se3(u, dt), xi.landmarks(),
                                      xi.point_count());
}

std::vector<Bearing> synthesize_measurements(const TotalState& xi) {
  std::vector<Bearing> out;
  out.reserve(xi.size());
  for (const auto& landmark : xi.landmarks()) {
    out.push_back(measure(xi.pose(), landmark));
  }
  return out;
}

std::vector<Bearing> synthesize_measurements(const TotalState& xi, const Mat3& camera) {
  if (std::abs(camera.determinant()) <= tol::kSingularMatrix) {
    throw SingularMatrix("synthesize_measurements: camera matrix is singular");
  }
  const Mat3 camera_inv = camera.inverse();
  const Mat4 pose_inv = xi.pose().inverse().matrix();
  std::vector<Bearing> out;
  out.reserve(xi.size());
  for (const auto& landmark : xi.landmarks()) {
    const Vec3 body = (pose_inv * landmark.rep()).head<3>();
    if (body.norm() <= tol::kDegenerateVector) {
      throw LandmarkAtOrigin("synthesize_measurements: landmark at the camera origin");
    }
    out.push_back(Bearing(camera_inv * (camera * body)));
  }
  return out;
}

std::vector<Vec3> sample_epsilons(std::uint64_t seed, double bound, std::size_t n) {
  std::mt19937_64 rng(seed);
  // Fixed 53-bit mapping instead of std::uniform_real_distribution so the
  // stream is identical across standard libraries.
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 e;
    for (int axis = 0; axis < 3; ++axis) {
      e(axis) = bound * (2.0 * unit() - 1.0);
    }
    out.push_back(e);
  }
  return out;
}

TotalState build_reference(const TotalState& truth, const std::vector<Vec3>& epsilons,
                           bool literal_embedding) {
  if (epsilons.size() != truth.size()) {
    throw DimensionMismatch("build_reference: epsilon count mismatch");
  }
  const std::vector<Bearing> measured = synthesize_measurements(truth);
  std::vector<ProjectivePoint> reference;
  reference.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const Vec3 direction = measured[i].rep() + epsilons[i];
    if (direction.norm() <= tol::kDegenerateReference) {
      throw DegenerateReference("build_reference: perturbed direction vanishes for landmark " +
                                std::to_string(i));
    }
    if (truth.layout_kind(i) == Kind::Point || literal_embedding) {
      reference.push_back(embed_point(2.0 * direction));
    } else {
      reference.push_back(embed_bearing(direction.normalized()));
    }
  }
  if (literal_embedding) {
    return TotalState::with_point_count(Pose::identity(), std::move(reference),
                                        truth.point_count());
  }
  return TotalState(Pose::identity(), std::move(reference));
}

LyapunovReport lyapunov_monitor(const TotalState& truth, const ObserverState& obs) {
  if (truth.size() != obs.reference.size() || truth.point_count() != obs.reference.point_count()) {
    throw DimensionMismatch("lyapunov monitor: truth/observer layout mismatch");
  }
  const TotalState estimate = estimated_state(obs);
  const Mat4 est_pose_inv = estimate.pose().inverse().matrix();
  const Mat4 truth_pose_inv = truth.pose().inverse().matrix();
  LyapunovReport report;
  report.storage.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    double l = 0.0;
    if (truth.layout_kind(i) == Kind::Point) {
      const Vec3 e = unembed_point(transform(est_pose_inv, estimate.landmarks()[i])) -
                     unembed_point(transform(truth_pose_inv, truth.landmarks()[i]));
      l = 0.5 * e.dot(obs.sigma[i].llt().solve(e));
    } else {
      const Bearing predicted = measure(estimate.pose(), estimate.landmarks()[i]);
      const Bearing actual = measure(truth.pose(), truth.landmarks()[i]);
      const double c = predicted.rep().dot(actual.rep());
      l = 0.5 * (1.0 - c * c);
    }
    report.storage.push_back(l);
    report.total += l;
  }
  return report;
}

std::vector<double> pe_monitor(const std::vector<PeSample>& history, double dt,
                               double window_seconds) {
  if (!(dt > 0.0) || !(window_seconds > 0.0)) {
    throw ValidationError("pe monitor: dt and window must be positive");
  }
  const auto window = static_cast<std::size_t>(std::llround(window_seconds / dt));
  if (window < 1) {
    throw ValidationError("pe monitor: window shorter than one step");
  }
  if (history.size() < window + 1) {
    throw InsufficientHistory("pe monitor: window not yet populated");
  }
  const std::size_t first = history.size() - window - 1;
  const std::size_t n = history[first].measurements.size();
  for (std::size_t k = first; k < history.size(); ++k) {
    if (history[k].measurements.size() != n) {
      throw DimensionMismatch("pe monitor: ragged measurement history");
    }
  }
  std::vector<double> out;
  out.reserve(n);
  Eigen::SelfAdjointEigenSolver<Mat3> eig;
  for (std::size_t i = 0; i < n; ++i) {
    Mat3 integral = Mat3::Zero();
    for (std::size_t k = first; k <= first + window; ++k) {
      const Vec3 inertial = history[k].attitude * history[k].measurements[i].rep();
      const double weight = (k == first || k == first + window) ? 0.5 : 1.0;
      integral += weight * projector3(inertial);
    }
    integral /= static_cast<double>(window);  // the dt factors cancel in the average
    eig.computeDirect(integral, Eigen::EigenvaluesOnly);
    out.push_back(eig.eigenvalues().minCoeff());
  }
  return out;
}

std::vector<Pose> align_trajectories(const std::vector<Pose>& truth,
                                     const std::vector<Pose>& estimated) {
  if (truth.empty() || estimated.empty()) {
    throw EmptyHistory("align_trajectories: empty history");
  }
  if (truth.size() != estimated.size()) {
    throw DimensionMismatch("align_trajectories: history length mismatch");
  }
  const Pose s = truth.back() * estimated.back().inverse();
  std::vector<Pose> aligned;
  aligned.reserve(estimated.size());
  for (const auto& pose : estimated) {
    aligned.push_back(s * pose);
  }
  return aligned;
}

SimulationRun run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  TotalState truth = initial_truth(cfg);
  const Twist u(cfg.angular_velocity, cfg.linear_velocity);
  const std::vector<Vec3> epsilons =
      sample_epsilons(cfg.seed, cfg.epsilon_bound, cfg.landmark_count());
  ObserverState obs = ObserverState::initialize(
      build_reference(truth, epsilons, cfg.literal_reference), cfg.gains, cfg.literal_reference);

  const auto steps = static_cast<std::size_t>(std::floor(cfg.duration / cfg.dt + 1e-9));
  const std::size_t n = cfg.landmark_count();
  const bool identity_camera = camera_is_identity(cfg.camera_matrix);
  const auto pe_steps = static_cast<std::size_t>(std::llround(cfg.pe_window / cfg.dt));

  // Prefix sums of the inertial-direction projectors make the windowed
  // excitation integral O(1) per frame.
  std::vector<std::vector<Mat3>> projector_prefix(n, std::vector<Mat3>{Mat3::Zero()});
  Eigen::SelfAdjointEigenSolver<Mat3> eig;

  std::vector<FrameRecord> frames;
  std::vector<Pose> truth_poses;
  std::vector<Pose> estimate_poses;
  if (steps > 0) {
    frames.reserve(steps + 1);
    truth_poses.reserve(steps + 1);
    estimate_poses.reserve(steps + 1);
  }

  auto record_frame = [&](double t, const std::vector<Bearing>& measurements) {
    FrameRecord frame;
    frame.t = t;
    frame.truth = truth.pose();
    frame.estimate_raw = estimated_state(obs).pose();
    const LyapunovReport report = lyapunov_monitor(truth, obs);
    frame.storage = report.storage;
    frame.lyapunov = report.total;

    const std::size_t recorded = projector_prefix[0].size() - 1;  // frames before this one
    frame.mu.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 inertial = truth.pose().rotation * measurements[i].rep();
      projector_prefix[i].push_back(projector_prefix[i].back() + projector3(inertial));
      if (pe_steps >= 1 && recorded >= pe_steps) {
        // Trapezoid over the trailing pe_steps intervals: full interior
        // weights, half weights on the window endpoints; dt cancels in the
        // windowed average.
        const auto& prefix = projector_prefix[i];
        const std::size_t last = prefix.size() - 1;
        const Mat3 window_sum = prefix[last] - prefix[last - 1 - pe_steps];
        const Mat3 newest = prefix[last] - prefix[last - 1];
        const Mat3 oldest = prefix[last - pe_steps] - prefix[last - 1 - pe_steps];
        const Mat3 average =
            (window_sum - 0.5 * newest - 0.5 * oldest) / static_cast<double>(pe_steps);
        eig.computeDirect(average, Eigen::EigenvaluesOnly);
        frame.mu[i] = eig.eigenvalues().minCoeff();
      }
    }

    if (!obs.sigma.empty()) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (const auto& sigma : obs.sigma) {
        eig.computeDirect(sigma, Eigen::EigenvaluesOnly);
        lo = std::min(lo, eig.eigenvalues().minCoeff());
        hi = std::max(hi, eig.eigenvalues().maxCoeff());
      }
      frame.sigma_min = lo;
      frame.sigma_max = hi;
    }

    truth_poses.push_back(truth.pose());
    estimate_poses.push_back(frame.estimate_raw);
    frames.push_back(std::move(frame));
  };

  for (std::size_t k = 0; k < steps; ++k) {
    const std::vector<Bearing> measurements = identity_camera
                                                  ? synthesize_measurements(truth)
                                                  : synthesize_measurements(truth, cfg.camera_matrix);
    record_frame(static_cast<double>(k) * cfg.dt, measurements);
    obs = observer_step(obs, u, measurements, cfg.dt);
    truth = propagate_truth(truth, u, cfg.dt);
  }
  if (steps > 0) {
    const std::vector<Bearing> measurements = identity_camera
                                                  ? synthesize_measurements(truth)
                                                  : synthesize_measurements(truth, cfg.camera_matrix);
    record_frame(static_cast<double>(steps) * cfg.dt, measurements);
  }

  TotalState estimate_final = estimated_state(obs);
  if (!frames.empty()) {
    const std::vector<Pose> aligned = align_trajectories(truth_poses, estimate_poses);
    for (std::size_t k = 0; k < frames.size(); ++k) {
      frames[k].estimate_aligned = aligned[k];
    }
    const Pose s = truth.pose() * estimate_final.pose().inverse();
    const Mat4 s_mat = s.matrix();
    std::vector<ProjectivePoint> aligned_landmarks;
    aligned_landmarks.reserve(estimate_final.size());
    for (const auto& landmark : estimate_final.landmarks()) {
      aligned_landmarks.push_back(transform(s_mat, landmark));
    }
    estimate_final = TotalState::with_point_count(s * estimate_final.pose(),
                                                  std::move(aligned_landmarks),
                                                  estimate_final.point_count());
  }

  const auto wall_end = std::chrono::steady_clock::now();
  return SimulationRun{std::move(frames), std::move(truth), std::move(estimate_final),
                       std::chrono::duration<double>(wall_end - wall_start).count()};
}

std::vector<FrameRecord> run_simulation(const ScenarioConfig& cfg) {
  return run_scenario(cfg).frames;
}

}  // namespace vslam

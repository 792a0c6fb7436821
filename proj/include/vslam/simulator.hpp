#ifndef VSLAM_SIMULATOR_HPP
#define VSLAM_SIMULATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vslam/observer.hpp"

namespace vslam {

/// Simulation scenario. The defaults reproduce the reference experiment:
/// four point landmarks and two bearing landmarks observed from a circular
/// trajectory of radius 3 m at height 3 m, constant body velocity, Euler
/// integration at 20 ms, random reference perturbations bounded by 0.1.
struct ScenarioConfig {
  std::vector<Vec3> points = {{4.0, 4.0, 0.0}, {-4.0, 4.0, 0.0}, {-4.0, -4.0, 0.0}, {4.0, -4.0, 0.0}};
  std::vector<Vec3> bearings = {{0.0, 0.0, -1.0}, {1.0, 0.0, 0.0}};
  Vec3 initial_position = {3.0, 0.0, 3.0};
  Vec3 initial_rpy = {0.0, 0.0, -1.5707963267948966};  // heading tangent to the circle
  Vec3 angular_velocity = {0.0, 0.0, -0.5};            // rad/s, body frame
  Vec3 linear_velocity = {1.5, 0.0, 0.0};              // m/s, body frame
  double epsilon_bound = 0.1;
  std::uint64_t seed = 0;
  Mat3 camera_matrix = Mat3::Identity();
  bool literal_reference = false;  // embed bearing references as points
  GainConfig gains;
  double dt = 0.02;
  double duration = 40.0;
  double pe_window = 2.0;  // excitation monitor window, seconds
  std::string csv_path;

  std::size_t landmark_count() const { return points.size() + bearings.size(); }

  /// Throws ValidationError naming the violated invariant.
  void validate() const;
};

/// One recorded simulation frame. The aligned estimate fields are filled after
/// the run, once the final-pose alignment is known.
struct FrameRecord {
  double t = 0.0;
  Pose truth;
  Pose estimate_raw;
  Pose estimate_aligned;
  std::vector<double> storage;  // per-landmark error energy l_i
  double lyapunov = 0.0;        // V = sum of l_i
  std::vector<double> mu;       // per-landmark excitation level; 0 until the window fills
  double sigma_min = 0.0;       // extrema over the point-landmark gain matrices
  double sigma_max = 0.0;
};

/// Attitude and measurement snapshot consumed by the excitation monitor.
struct PeSample {
  Rotation attitude;
  std::vector<Bearing> measurements;
};

struct SimulationRun {
  std::vector<FrameRecord> frames;
  TotalState final_truth;
  TotalState final_estimate_aligned;
  double wall_seconds = 0.0;
};

/// True state at t = 0 for the configured scenario.
TotalState initial_truth(const ScenarioConfig& cfg);

/// One Euler step of the true system: the pose moves by exp(U dt), the
/// landmarks stay fixed (static environment).
TotalState propagate_truth(const TotalState& xi, const Twist& u, double dt);

/// Camera outputs of the true state, in landmark order.
std::vector<Bearing> synthesize_measurements(const TotalState& xi);

/// Same, but routed through an invertible camera matrix and its inverse,
/// exercising the calibrated-camera identity.
std::vector<Bearing> synthesize_measurements(const TotalState& xi, const Mat3& camera);

/// Per-axis uniform samples on [-bound, bound], one Vec3 per landmark,
/// reproducible for a fixed seed independent of platform.
std::vector<Vec3> sample_epsilons(std::uint64_t seed, double bound, std::size_t n);

/// Reference configuration: identity pose, each landmark rebuilt from its
/// measured direction perturbed by epsilon. Point landmarks are embedded at
/// depth 2; bearing landmarks keep their orbit by embedding the normalised
/// direction as a bearing, unless literal_embedding asks for the point
/// embedding in every slot. Throws DegenerateReference when a perturbed
/// direction vanishes.
TotalState build_reference(const TotalState& truth, const std::vector<Vec3>& epsilons,
                           bool literal_embedding = false);

struct LyapunovReport {
  std::vector<double> storage;
  double total = 0.0;
};

/// Per-landmark error energies against ground truth: the sigma-weighted
/// squared position error for point landmarks, the squared-sine-of-angle form
/// for bearing landmarks.
LyapunovReport lyapunov_monitor(const TotalState& truth, const ObserverState& obs);

/// Windowed excitation levels: the minimum eigenvalue of the trapezoidal
/// average of the projectors onto the planes normal to the inertial-frame
/// measured directions, over the trailing window. Throws InsufficientHistory
/// until the window is fully populated.
std::vector<double> pe_monitor(const std::vector<PeSample>& history, double dt,
                               double window_seconds);

/// Removes the frame-choice ambiguity of the estimate: applies
/// S = truth_final * estimate_final⁻¹ to every estimated pose, so the final
/// estimated pose coincides with the final true pose.
std::vector<Pose> align_trajectories(const std::vector<Pose>& truth,
                                     const std::vector<Pose>& estimated);

/// Full deterministic simulation: builds truth, reference and observer from
/// the config, loops measure / step / monitor, then aligns the estimate
/// history to the final true pose.
SimulationRun run_scenario(const ScenarioConfig& cfg);

/// Frame records only; see run_scenario.
std::vector<FrameRecord> run_simulation(const ScenarioConfig& cfg);

}  // namespace vslam

#endif  // VSLAM_SIMULATOR_HPP

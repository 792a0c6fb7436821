#ifndef VSLAM_HARNESS_HPP
#define VSLAM_HARNESS_HPP

#include <string>
#include <vector>

#include "vslam/simulator.hpp"

namespace vslam {

/// Parses the sectioned key=value config format (sections [scenario], [gains],
/// [integration], [output]; '#' or ';' comments). Unknown sections or keys are
/// ParseError with file/line context; values violating a ScenarioConfig
/// invariant are ValidationError. Every omitted key keeps its default.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

/// Serialises a config in the format parse_config reads back; doubles use 17
/// significant digits so the round trip is exact.
std::string config_to_string(const ScenarioConfig& cfg);

/// Aggregate statistics of one run.
struct RunSummary {
  double final_lyapunov = 0.0;
  double log10_slope = 0.0;  // fitted slope of log10 V over t, 1/s
  double log10_r2 = 0.0;
  bool slope_valid = false;  // requires >= 10 samples with V > 1e-10
  std::vector<double> final_storage;
  std::vector<double> point_position_errors;  // aligned, metres, per point landmark
  std::vector<double> bearing_angle_errors;   // radians, per bearing landmark
  std::vector<double> final_mu;
  double wall_seconds = 0.0;
};

RunSummary summarize(const SimulationRun& run);
std::string summary_to_string(const RunSummary& summary);

/// CSV frame log. Columns:
///   t, V, log10V, l_1..l_n, px, py, pz, ex, ey, ez, mu_1..mu_n, sigma_min, sigma_max
/// with (px,py,pz) the true position and (ex,ey,ez) the aligned estimate.
/// Values are decimal text with 12 significant digits; log10V is clamped at
/// log10(1e-300) so rows stay finite when V reaches zero. Byte output is a
/// pure function of the frames.
std::string csv_to_string(const std::vector<FrameRecord>& frames);
void emit_csv(const std::vector<FrameRecord>& frames, const std::string& path);

/// Least-squares line fit with coefficient of determination; slope/intercept
/// are zero when fewer than two samples are given.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vslam

#endif  // VSLAM_HARNESS_HPP

// Python bindings for the observer core: geometry and projective types, the
// symmetry group and lift, the observer operations, and the simulation
// harness.

#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vslam/harness.hpp"
#include "vslam/observer.hpp"
#include "vslam/simulator.hpp"

namespace py = pybind11;
using namespace vslam;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Equivariant visual-SLAM observer: projective landmark geometry, "
            "symmetry-group machinery, Riccati-gain observer and simulator";

  // Exceptions: register the base first so derived categories take precedence.
  const auto base = py::register_exception<Error>(m, "VslamError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  py::enum_<Kind>(m, "Kind")
      .value("POINT", Kind::Point)
      .value("BEARING", Kind::Bearing);

  py::class_<Rotation>(m, "Rotation")
      .def(py::init<const Mat3&>(), py::arg("matrix"))
      .def_static("identity", &Rotation::identity)
      .def("matrix", &Rotation::matrix)
      .def("inverse", &Rotation::inverse)
      .def(py::self * py::self)
      .def("__matmul__", [](const Rotation& r, const Vec3& v) { return r * v; });

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init<Rotation, Vec3>(), py::arg("rotation"), py::arg("translation"))
      .def_static("identity", &Pose::identity)
      .def_readonly("rotation", &Pose::rotation)
      .def_readonly("translation", &Pose::translation)
      .def("matrix", &Pose::matrix)
      .def("inverse", &Pose::inverse)
      .def(py::self * py::self);

  py::class_<Twist>(m, "Twist")
      .def(py::init<>())
      .def(py::init<Vec3, Vec3>(), py::arg("omega"), py::arg("v"))
      .def_readonly("omega", &Twist::omega)
      .def_readonly("v", &Twist::v)
      .def("matrix", &Twist::matrix)
      .def(py::self + py::self);

  py::class_<Bearing>(m, "Bearing")
      .def(py::init<const Vec3&>(), py::arg("direction"))
      .def("rep", &Bearing::rep)
      .def("class_distance", &Bearing::class_distance)
      .def("angle_to", &Bearing::angle_to);

  py::class_<ProjectivePoint>(m, "ProjectivePoint")
      .def_static("from_homogeneous", &ProjectivePoint::from_homogeneous, py::arg("x"))
      .def("rep", &ProjectivePoint::rep)
      .def("kind", &ProjectivePoint::kind)
      .def("class_distance", &ProjectivePoint::class_distance)
      .def("same_class", &ProjectivePoint::same_class, py::arg("other"),
           py::arg("tolerance") = tol::kClassEquality);

  m.def("skew", &skew, py::arg("w"));
  m.def("projector3", &projector3, py::arg("y"));
  m.def("projector4", &projector4, py::arg("y"));
  m.def("exp_so3", &exp_so3, py::arg("w"));
  m.def("exp_se3", &exp_se3, py::arg("u"), py::arg("dt"));
  m.def("embed_point", &embed_point, py::arg("p"));
  m.def("embed_bearing", &embed_bearing, py::arg("b"));
  m.def("unembed", &unembed, py::arg("x"));
  m.def("unembed_point", &unembed_point, py::arg("x"));
  m.def("unembed_bearing", &unembed_bearing, py::arg("x"));
  m.def("transform", &transform, py::arg("a"), py::arg("x"));
  m.def("measure", &measure, py::arg("pose"), py::arg("landmark"));

  py::class_<ScaledRotation>(m, "ScaledRotation")
      .def(py::init<>())
      .def(py::init<Rotation, double>(), py::arg("rotation"), py::arg("scale"))
      .def_readonly("rotation", &ScaledRotation::rotation)
      .def_readonly("scale", &ScaledRotation::scale)
      .def("matrix", &ScaledRotation::matrix)
      .def("inverse", &ScaledRotation::inverse)
      .def(py::self * py::self);

  py::class_<ScaledRotationTangent>(m, "ScaledRotationTangent")
      .def(py::init<>())
      .def(py::init([](const Vec3& w, double s) {
             return ScaledRotationTangent{w, s};
           }),
           py::arg("w"), py::arg("s"))
      .def_readwrite("w", &ScaledRotationTangent::w)
      .def_readwrite("s", &ScaledRotationTangent::s)
      .def("matrix", &ScaledRotationTangent::matrix)
      .def(py::self + py::self);

  m.def("exp_scaled_rotation", &exp_scaled_rotation, py::arg("tangent"), py::arg("dt"));

  py::class_<GroupElement>(m, "GroupElement")
      .def_static("identity", &GroupElement::identity, py::arg("n"))
      .def_readwrite("pose", &GroupElement::pose)
      .def_readwrite("landmarks", &GroupElement::landmarks)
      .def("size", &GroupElement::size)
      .def("inverse", &GroupElement::inverse)
      .def(py::self * py::self);

  py::class_<GroupTangent>(m, "GroupTangent")
      .def(py::init<>())
      .def_readwrite("pose", &GroupTangent::pose)
      .def_readwrite("landmarks", &GroupTangent::landmarks)
      .def("size", &GroupTangent::size)
      .def(py::self + py::self);

  m.def("group_exp", &group_exp, py::arg("tangent"), py::arg("dt"));

  py::class_<TotalState>(m, "TotalState")
      .def(py::init<Pose, std::vector<ProjectivePoint>>(), py::arg("pose"), py::arg("landmarks"))
      .def_static("with_point_count", &TotalState::with_point_count, py::arg("pose"),
                  py::arg("landmarks"), py::arg("point_count"))
      .def("pose", &TotalState::pose)
      .def("landmarks", &TotalState::landmarks)
      .def("size", &TotalState::size)
      .def("point_count", &TotalState::point_count)
      .def("bearing_count", &TotalState::bearing_count);

  m.def("group_action", &group_action, py::arg("x"), py::arg("xi"));
  m.def("landmark_lift",
        py::overload_cast<const Twist&, const Vec4&>(&landmark_lift), py::arg("u"),
        py::arg("body_rep"));
  m.def("velocity_lift", &velocity_lift, py::arg("xi"), py::arg("u"));

  py::class_<GainConfig>(m, "GainConfig")
      .def(py::init<>())
      .def_readwrite("k", &GainConfig::k)
      .def_readwrite("k_g", &GainConfig::k_g)
      .def_readwrite("k_h", &GainConfig::k_h)
      .def_readwrite("sigma0_scale", &GainConfig::sigma0_scale)
      .def("validate", &GainConfig::validate);

  py::class_<Innovation>(m, "Innovation")
      .def_readonly("pose", &Innovation::pose)
      .def_readonly("landmarks", &Innovation::landmarks);

  py::class_<ObserverState>(m, "ObserverState")
      .def_static("initialize", &ObserverState::initialize, py::arg("reference"),
                  py::arg("gains"), py::arg("allow_kind_mismatch") = false)
      .def_readonly("group_state", &ObserverState::group_state)
      .def_readonly("sigma", &ObserverState::sigma)
      .def_readonly("reference", &ObserverState::reference)
      .def_readonly("gains", &ObserverState::gains);

  m.def("estimated_state", &estimated_state, py::arg("observer"));
  m.def("predicted_measurements", &predicted_measurements, py::arg("observer"));
  m.def("compute_innovation", &compute_innovation, py::arg("observer"), py::arg("measurements"));
  m.def("landmark_innovation", &landmark_innovation, py::arg("predicted"), py::arg("measured"),
        py::arg("sigma"), py::arg("gains"), py::arg("kind"));
  m.def("riccati_step", &riccati_step, py::arg("sigma"), py::arg("omega"), py::arg("measured"),
        py::arg("gains"), py::arg("dt"));
  m.def(
      "pose_innovation",
      [](const std::vector<ProjectivePoint>& theta, const std::vector<ScaledRotationTangent>& dq) {
        const PoseInnovation result = pose_innovation(theta, dq);
        return py::make_tuple(result.twist, result.rank);
      },
      py::arg("body_landmarks"), py::arg("landmark_innovations"));
  m.def("observer_step", &observer_step, py::arg("observer"), py::arg("u"),
        py::arg("measurements"), py::arg("dt"));

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("points", &ScenarioConfig::points)
      .def_readwrite("bearings", &ScenarioConfig::bearings)
      .def_readwrite("initial_position", &ScenarioConfig::initial_position)
      .def_readwrite("initial_rpy", &ScenarioConfig::initial_rpy)
      .def_readwrite("angular_velocity", &ScenarioConfig::angular_velocity)
      .def_readwrite("linear_velocity", &ScenarioConfig::linear_velocity)
      .def_readwrite("epsilon_bound", &ScenarioConfig::epsilon_bound)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("camera_matrix", &ScenarioConfig::camera_matrix)
      .def_readwrite("literal_reference", &ScenarioConfig::literal_reference)
      .def_readwrite("gains", &ScenarioConfig::gains)
      .def_readwrite("dt", &ScenarioConfig::dt)
      .def_readwrite("duration", &ScenarioConfig::duration)
      .def_readwrite("pe_window", &ScenarioConfig::pe_window)
      .def_readwrite("csv_path", &ScenarioConfig::csv_path)
      .def("landmark_count", &ScenarioConfig::landmark_count)
      .def("validate", &ScenarioConfig::validate);

  py::class_<FrameRecord>(m, "FrameRecord")
      .def_readonly("t", &FrameRecord::t)
      .def_readonly("truth", &FrameRecord::truth)
      .def_readonly("estimate_raw", &FrameRecord::estimate_raw)
      .def_readonly("estimate_aligned", &FrameRecord::estimate_aligned)
      .def_readonly("storage", &FrameRecord::storage)
      .def_readonly("lyapunov", &FrameRecord::lyapunov)
      .def_readonly("mu", &FrameRecord::mu)
      .def_readonly("sigma_min", &FrameRecord::sigma_min)
      .def_readonly("sigma_max", &FrameRecord::sigma_max);

  py::class_<PeSample>(m, "PeSample")
      .def(py::init([](const Rotation& attitude, const std::vector<Bearing>& measurements) {
             return PeSample{attitude, measurements};
           }),
           py::arg("attitude"), py::arg("measurements"))
      .def_readonly("attitude", &PeSample::attitude)
      .def_readonly("measurements", &PeSample::measurements);

  py::class_<SimulationRun>(m, "SimulationRun")
      .def_readonly("frames", &SimulationRun::frames)
      .def_readonly("final_truth", &SimulationRun::final_truth)
      .def_readonly("final_estimate_aligned", &SimulationRun::final_estimate_aligned)
      .def_readonly("wall_seconds", &SimulationRun::wall_seconds);

  m.def("initial_truth", &initial_truth, py::arg("config"));
  m.def("propagate_truth", &propagate_truth, py::arg("xi"), py::arg("u"), py::arg("dt"));
  m.def("synthesize_measurements",
        py::overload_cast<const TotalState&>(&synthesize_measurements), py::arg("xi"));
  m.def("synthesize_measurements",
        py::overload_cast<const TotalState&, const Mat3&>(&synthesize_measurements),
        py::arg("xi"), py::arg("camera"));
  m.def("sample_epsilons", &sample_epsilons, py::arg("seed"), py::arg("bound"), py::arg("n"));
  m.def("build_reference", &build_reference, py::arg("truth"), py::arg("epsilons"),
        py::arg("literal_embedding") = false);
  m.def(
      "lyapunov_monitor",
      [](const TotalState& truth, const ObserverState& obs) {
        const LyapunovReport report = lyapunov_monitor(truth, obs);
        return py::make_tuple(report.storage, report.total);
      },
      py::arg("truth"), py::arg("observer"));
  m.def("pe_monitor", &pe_monitor, py::arg("history"), py::arg("dt"), py::arg("window_seconds"));
  m.def("align_trajectories", &align_trajectories, py::arg("truth"), py::arg("estimated"));
  m.def("run_scenario", &run_scenario, py::arg("config"));
  m.def("run_simulation", &run_simulation, py::arg("config"));

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("final_lyapunov", &RunSummary::final_lyapunov)
      .def_readonly("log10_slope", &RunSummary::log10_slope)
      .def_readonly("log10_r2", &RunSummary::log10_r2)
      .def_readonly("slope_valid", &RunSummary::slope_valid)
      .def_readonly("final_storage", &RunSummary::final_storage)
      .def_readonly("point_position_errors", &RunSummary::point_position_errors)
      .def_readonly("bearing_angle_errors", &RunSummary::bearing_angle_errors)
      .def_readonly("final_mu", &RunSummary::final_mu)
      .def_readonly("wall_seconds", &RunSummary::wall_seconds);

  m.def("parse_config", &parse_config, py::arg("path"));
  m.def("parse_config_text", &parse_config_text, py::arg("text"), py::arg("origin"));
  m.def("config_to_string", &config_to_string, py::arg("config"));
  m.def("summarize", &summarize, py::arg("run"));
  m.def("summary_to_string", &summary_to_string, py::arg("summary"));
  m.def("csv_to_string", &csv_to_string, py::arg("frames"));
  m.def("emit_csv", &emit_csv, py::arg("frames"), py::arg("path"));

  m.attr("__version__") = "0.1.0";
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "vslam/observer.hpp"
#include "vslam/simulator.hpp"

using namespace vslam;

namespace {

// Independent residual assembly for the pose-innovation cost, written from
// the displayed form rather than sharing the library's assembly.
double cost_oracle(const std::vector<Vec4>& theta, const std::vector<ScaledRotationTangent>& dq,
                   const Eigen::Matrix<double, 6, 1>& z) {
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const Vec4& th = theta[i];
    const double nm = th.norm();
    Vec4 residual;
    residual.head<3>() = -th.head<3>().cross(z.head<3>()) + th(3) * z.tail<3>() +
                         dq[i].w.cross(th.head<3>());
    residual(3) = dq[i].s * th(3);
    residual -= th * (th.dot(residual) / (nm * nm));
    total += residual.squaredNorm() / (nm * nm);
  }
  return total;
}

// Dense normal-equations solve of the same least-squares problem.
Eigen::Matrix<double, 6, 1> normal_equations_oracle(const std::vector<Vec4>& theta,
                                                    const std::vector<ScaledRotationTangent>& dq,
                                                    double* min_eig = nullptr) {
  Eigen::Matrix<double, 6, 6> n = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const Vec4& th = theta[i];
    const double nm = th.norm();
    const Mat4 pbar = Mat4::Identity() - th * th.transpose() / (nm * nm);
    Eigen::Matrix<double, 4, 6> m = Eigen::Matrix<double, 4, 6>::Zero();
    m.topLeftCorner<3, 3>() = -skew(th.head<3>());
    m.topRightCorner<3, 3>() = th(3) * Mat3::Identity();
    const Eigen::Matrix<double, 4, 6> a = pbar * m / nm;
    const Vec4 b = pbar * (dq[i].matrix() * th) / nm;
    n += a.transpose() * a;
    g += a.transpose() * b;
  }
  if (min_eig != nullptr) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(n);
    *min_eig = eig.eigenvalues().minCoeff();
  }
  return n.ldlt().solve(-g);
}

// Steepest descent with exact quadratic line search on numerically
// differentiated cost_oracle.
Eigen::Matrix<double, 6, 1> gradient_descent_oracle(const std::vector<Vec4>& theta,
                                                    const std::vector<ScaledRotationTangent>& dq) {
  Eigen::Matrix<double, 6, 1> z = Eigen::Matrix<double, 6, 1>::Zero();
  const double eps = 1e-6;
  for (int iter = 0; iter < 50000; ++iter) {
    Eigen::Matrix<double, 6, 1> grad;
    for (int j = 0; j < 6; ++j) {
      Eigen::Matrix<double, 6, 1> zp = z, zm = z;
      zp(j) += eps;
      zm(j) -= eps;
      grad(j) = (cost_oracle(theta, dq, zp) - cost_oracle(theta, dq, zm)) / (2.0 * eps);
    }
    const double gnorm = grad.norm();
    if (gnorm < 1e-11) break;
    const Eigen::Matrix<double, 6, 1> dir = -grad / gnorm;
    const double h = 1e-4;
    const double curvature = (cost_oracle(theta, dq, Eigen::Matrix<double, 6, 1>(z + h * dir)) -
                              2.0 * cost_oracle(theta, dq, z) +
                              cost_oracle(theta, dq, Eigen::Matrix<double, 6, 1>(z - h * dir))) /
                             (h * h);
    if (curvature <= 0.0) break;
    z += (gnorm / curvature) * dir;
  }
  return z;
}

ObserverState small_observer(oracles::Rng& rng, std::size_t n_points, std::size_t n_bearings) {
  const TotalState truth = rng.total_state(n_points, n_bearings);
  std::vector<Vec3> eps;
  for (std::size_t i = 0; i < truth.size(); ++i) eps.push_back(rng.vec3(0.08));
  return ObserverState::initialize(build_reference(truth, eps), GainConfig{});
}

}  // namespace

TEST_CASE("gain validation") {
  GainConfig gains;
  CHECK_NOTHROW(gains.validate());
  gains.k = 0.5;
  CHECK_THROWS_AS(gains.validate(), ValidationError);
  gains = GainConfig{};
  gains.k_g = 0.0;
  CHECK_THROWS_AS(gains.validate(), ValidationError);
  gains = GainConfig{};
  gains.sigma0_scale = -1.0;
  CHECK_THROWS_AS(gains.validate(), ValidationError);
}

TEST_CASE("observer initialisation: identity transport, sigma0, orbit check") {
  oracles::Rng rng(41);
  const TotalState truth = rng.total_state(2, 1);
  std::vector<Vec3> eps(3, Vec3::Zero());
  const ObserverState obs = ObserverState::initialize(build_reference(truth, eps), GainConfig{});
  CHECK((obs.group_state.pose.matrix() - Mat4::Identity()).norm() == 0.0);
  CHECK(obs.sigma.size() == 2);
  CHECK((obs.sigma[0] - 25.0 * Mat3::Identity()).norm() == 0.0);

  // estimated state of the identity transport is the reference itself
  const TotalState est = estimated_state(obs);
  CHECK((est.pose().matrix() - obs.reference.pose().matrix()).norm() <= 1e-15);
  for (std::size_t i = 0; i < est.size(); ++i) {
    CHECK(est.landmarks()[i].class_distance(obs.reference.landmarks()[i]) <= 1e-15);
  }

  // a bearing-type representative in a point slot violates the orbit match
  const TotalState bad = TotalState::with_point_count(
      Pose::identity(), {embed_bearing(Vec3(0, 0, 1)), embed_bearing(Vec3(1, 0, 0))}, 1);
  CHECK_THROWS_AS(ObserverState::initialize(bad, GainConfig{}), ValidationError);
  CHECK_NOTHROW(ObserverState::initialize(bad, GainConfig{}, true));
}

TEST_CASE("estimated state satisfies the state invariants under random transport") {
  oracles::Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    ObserverState obs = small_observer(rng, 2, 1);
    obs.group_state = rng.group_element(3);
    const TotalState est = estimated_state(obs);  // constructor re-checks invariants
    CHECK(est.point_count() == 2);
    for (std::size_t j = 0; j < est.size(); ++j) {
      CHECK(est.landmarks()[j].kind() == obs.reference.landmarks()[j].kind());
    }
    // predictions come from exactly the estimated-state measurement path
    const std::vector<Bearing> predicted = predicted_measurements(obs);
    for (std::size_t j = 0; j < est.size(); ++j) {
      CHECK(predicted[j].class_distance(measure(est.pose(), est.landmarks()[j])) == 0.0);
    }
  }
}

TEST_CASE("landmark innovation: agreement, sign flips, hand value") {
  const GainConfig gains;  // k = 1, k_G = 2, k_H = 0.5

  // predicted equal to measured: no correction
  const Bearing y(Vec3(0.3, -0.4, 0.8660254037844386));
  const ScaledRotationTangent at_agreement =
      landmark_innovation(y, y, Mat3::Identity(), gains, Kind::Point);
  CHECK(at_agreement.w.norm() <= 1e-12);
  CHECK(std::abs(at_agreement.s) <= 1e-12);

  // exactly representable unit directions: sign flips are bitwise neutral
  {
    const Bearing yhat(Vec3(0.6, 0.8, 0.0));
    const Bearing ym(Vec3(0, 0, 1));
    const ScaledRotationTangent base =
        landmark_innovation(yhat, ym, Mat3::Identity(), gains, Kind::Point);
    const ScaledRotationTangent f1 = landmark_innovation(Bearing(Vec3(-0.6, -0.8, 0.0)), ym,
                                                         Mat3::Identity(), gains, Kind::Point);
    const ScaledRotationTangent f2 = landmark_innovation(yhat, Bearing(Vec3(0, 0, -1)),
                                                         Mat3::Identity(), gains, Kind::Point);
    CHECK((base.w - f1.w).norm() == 0.0);
    CHECK(base.s == f1.s);
    CHECK((base.w - f2.w).norm() == 0.0);
    CHECK(base.s == f2.s);
  }

  // random directions: the constructor renormalises, so flips agree to the
  // last couple of bits rather than bitwise
  oracles::Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const Bearing yhat(rng.unit3());
    const Bearing ym(rng.unit3());
    const Bearing yhat_neg(Vec3(-yhat.rep()));
    const Bearing ym_neg(Vec3(-ym.rep()));
    const Mat3 sigma = 2.0 * Mat3::Identity() + skew(rng.vec3(0.4)) * skew(rng.vec3(0.4)).transpose();
    for (Kind kind : {Kind::Point, Kind::Bearing}) {
      const ScaledRotationTangent base = landmark_innovation(yhat, ym, sigma, gains, kind);
      const ScaledRotationTangent f1 = landmark_innovation(yhat_neg, ym, sigma, gains, kind);
      const ScaledRotationTangent f2 = landmark_innovation(yhat, ym_neg, sigma, gains, kind);
      CHECK((base.w - f1.w).norm() <= 1e-14);
      CHECK(std::abs(base.s - f1.s) <= 1e-14 * (1.0 + std::abs(base.s)));
      CHECK((base.w - f2.w).norm() <= 1e-14);
      CHECK(std::abs(base.s - f2.s) <= 1e-14 * (1.0 + std::abs(base.s)));
    }
  }

  // hand-evaluated case: yhat = e1, y = e2, sigma = I, unit gains, point type
  GainConfig unit_gains;
  unit_gains.k = 1.0;
  unit_gains.k_g = 1.0;
  const ScaledRotationTangent hand = landmark_innovation(
      Bearing(Vec3(1, 0, 0)), Bearing(Vec3(0, 1, 0)), Mat3::Identity(), unit_gains, Kind::Point);
  CHECK(hand.w.norm() <= 1e-15);
  CHECK(hand.s == -1.0);

  // full displayed-formula oracle on random inputs
  for (int i = 0; i < 200; ++i) {
    const Bearing yhat(rng.unit3());
    const Bearing ym(rng.unit3());
    Mat3 sigma = Mat3::Identity() * rng.uniform(0.2, 3.0);
    sigma(0, 1) = sigma(1, 0) = rng.uniform(-0.1, 0.1);
    const Kind kind = i % 2 == 0 ? Kind::Point : Kind::Bearing;
    const Mat3 py = Mat3::Identity() - ym.rep() * ym.rep().transpose();
    const Mat3 kmat = kind == Kind::Point ? Mat3(gains.k * sigma * py * (gains.k_g * Mat3::Identity()))
                                          : Mat3(gains.k * py);
    const Vec3 w_expected = skew(yhat.rep()) * (kmat * (py * yhat.rep()));
    const double s_expected = -yhat.rep().dot(kmat * (py * yhat.rep()));
    const ScaledRotationTangent got = landmark_innovation(yhat, ym, sigma, gains, kind);
    CHECK((got.w - w_expected).norm() <= 1e-12);
    CHECK(std::abs(got.s - s_expected) <= 1e-12);
  }
}

TEST_CASE("riccati step follows the scalar recursions in the measured frame") {
  const GainConfig gains;  // k_G = 2, k_H = 0.5
  const Bearing y(Vec3(0, 0, 1));
  const double dt = 0.02;

  Mat3 sigma = 25.0 * Mat3::Identity();
  double transverse = 25.0;
  double along = 25.0;
  for (int step = 0; step < 1000; ++step) {  // 20 s
    sigma = riccati_step(sigma, Vec3::Zero(), y, gains, dt);
    transverse += dt * (gains.k_h - gains.k_g * transverse * transverse);
    along += dt * gains.k_h;
    CHECK(std::abs(sigma(0, 0) - transverse) <= 1e-9 * std::max(1.0, transverse));
    CHECK(std::abs(sigma(1, 1) - transverse) <= 1e-9 * std::max(1.0, transverse));
    CHECK(std::abs(sigma(2, 2) - along) <= 1e-6);
    CHECK((sigma - sigma.transpose()).norm() == 0.0);
  }
  // transverse equilibrium sqrt(k_H / k_G) = 0.5 reached after 20 s
  CHECK(std::abs(sigma(0, 0) - 0.5) <= 1e-3);
  CHECK(std::abs(sigma(1, 1) - 0.5) <= 1e-3);
}

TEST_CASE("riccati transport alone conjugates by the frame rotation") {
  GainConfig free_gains;  // formal test-only values
  free_gains.k_g = 0.0;
  free_gains.k_h = 0.0;
  const Vec3 omega(0, 0, 1);
  Mat3 sigma0;
  sigma0 << 2.0, 0.3, -0.1, 0.3, 1.5, 0.2, -0.1, 0.2, 1.0;
  Mat3 sigma = sigma0;
  const double dt = 1e-4;
  const int steps = 10000;  // 1 s
  for (int i = 0; i < steps; ++i) {
    sigma = riccati_step(sigma, omega, Bearing(Vec3(0, 0, 1)), free_gains, dt);
  }
  const Mat3 r = exp_so3(-omega).matrix();  // t = 1 s
  CHECK((sigma - r * sigma0 * r.transpose()).norm() <= 1e-3);
}

TEST_CASE("riccati blow-up detection") {
  const GainConfig gains;
  const Bearing y(Vec3(0, 0, 1));
  CHECK_THROWS_AS(riccati_step(25.0 * Mat3::Identity(), Vec3::Zero(), y, gains, 1.0),
                  RiccatiBlowup);
}

TEST_CASE("pose innovation: zero input, rank deficiency, scale invariance") {
  oracles::Rng rng(44);

  // zero landmark innovations give the zero (minimum-norm) correction
  std::vector<Vec4> theta;
  std::vector<ScaledRotationTangent> dq;
  for (int i = 0; i < 4; ++i) {
    theta.push_back(Vec4(rng.unit3().x(), rng.unit3().y(), rng.unit3().z(), rng.uniform(0.2, 1.0)));
    dq.push_back(ScaledRotationTangent{});
  }
  const PoseInnovation zero = pose_innovation(theta, dq);
  CHECK(zero.twist.omega.norm() == 0.0);
  CHECK(zero.twist.v.norm() == 0.0);

  // a single bearing landmark cannot constrain translation: rank < 6, no throw
  std::vector<Vec4> one_bearing = {Vec4(0, 0, 1, 0)};
  std::vector<ScaledRotationTangent> one_dq = {{Vec3(0.1, -0.2, 0.0), 0.0}};
  const PoseInnovation deficient = pose_innovation(one_bearing, one_dq);
  CHECK(deficient.rank < 6);
  ensure_finite(deficient.twist.omega, "test");

  CHECK_THROWS_AS(pose_innovation(std::vector<Vec4>{}, std::vector<ScaledRotationTangent>{}),
                  ValidationError);

  // rescaling every representative changes neither the cost nor the minimiser
  for (int inst = 0; inst < 100; ++inst) {
    std::vector<Vec4> reps;
    std::vector<ScaledRotationTangent> innovations;
    const std::size_t n = 5;
    for (std::size_t i = 0; i < n; ++i) {
      Vec4 v;
      v << rng.unit3() * rng.uniform(0.5, 2.0), rng.uniform(0.2, 1.5);
      reps.push_back(v);
      innovations.push_back({rng.vec3(0.3), rng.uniform(-0.3, 0.3)});
    }
    const PoseInnovation base = pose_innovation(reps, innovations);
    const double base_cost = pose_innovation_cost(reps, innovations, base.twist);

    std::vector<Vec4> scaled = reps;
    for (auto& v : scaled) v *= rng.nonzero_scale(4.0);
    const PoseInnovation after = pose_innovation(scaled, innovations);
    const double after_cost = pose_innovation_cost(scaled, innovations, after.twist);

    CHECK((base.twist.omega - after.twist.omega).norm() <= 1e-10);
    CHECK((base.twist.v - after.twist.v).norm() <= 1e-10);
    CHECK(std::abs(base_cost - after_cost) <= 1e-10 * (1.0 + base_cost));
    // the cost itself is invariant at any fixed candidate
    const Twist cand(rng.vec3(0.5), rng.vec3(0.5));
    CHECK(std::abs(pose_innovation_cost(reps, innovations, cand) -
                   pose_innovation_cost(scaled, innovations, cand)) <= 1e-10);
  }
}

TEST_CASE("pose innovation matches the dense normal-equations oracle") {
  oracles::Rng rng(45);
  int tested = 0;
  while (tested < 100) {
    std::vector<Vec4> theta;
    std::vector<ScaledRotationTangent> dq;
    for (int i = 0; i < 6; ++i) {
      Vec4 v;
      v << rng.unit3() * rng.uniform(0.5, 2.0), rng.uniform(0.3, 1.5);
      theta.push_back(v);
      dq.push_back({rng.vec3(0.3), rng.uniform(-0.3, 0.3)});
    }
    double min_eig = 0.0;
    const Eigen::Matrix<double, 6, 1> expected = normal_equations_oracle(theta, dq, &min_eig);
    if (min_eig < 0.05) continue;  // keep instances well conditioned
    ++tested;
    const PoseInnovation got = pose_innovation(theta, dq);
    CHECK((got.twist.omega - expected.head<3>()).norm() <= 1e-8);
    CHECK((got.twist.v - expected.tail<3>()).norm() <= 1e-8);
    CHECK(got.rank == 6);
  }
}

TEST_CASE("pose innovation matches a numerical gradient-descent oracle") {
  oracles::Rng rng(46);
  int tested = 0;
  while (tested < 3) {
    std::vector<Vec4> theta;
    std::vector<ScaledRotationTangent> dq;
    for (int i = 0; i < 6; ++i) {
      Vec4 v;
      v << rng.unit3() * rng.uniform(0.5, 2.0), rng.uniform(0.3, 1.5);
      theta.push_back(v);
      dq.push_back({rng.vec3(0.3), rng.uniform(-0.3, 0.3)});
    }
    double min_eig = 0.0;
    normal_equations_oracle(theta, dq, &min_eig);
    if (min_eig < 0.2) continue;
    ++tested;
    const Eigen::Matrix<double, 6, 1> descended = gradient_descent_oracle(theta, dq);
    const PoseInnovation got = pose_innovation(theta, dq);
    Eigen::Matrix<double, 6, 1> z;
    z << got.twist.omega, got.twist.v;
    CHECK((z - descended).norm() <= 1e-8);
    // and the library cost agrees with the independent cost assembly
    CHECK(std::abs(pose_innovation_cost(theta, dq, got.twist) - cost_oracle(theta, dq, z)) <=
          1e-12 * (1.0 + cost_oracle(theta, dq, z)));
  }
}

TEST_CASE("innovation bundle vanishes at perfect agreement") {
  oracles::Rng rng(47);
  const TotalState truth = rng.total_state(2, 1);
  const ObserverState obs =
      ObserverState::initialize(TotalState(truth.pose(), truth.landmarks()), GainConfig{});
  const Innovation innovation = compute_innovation(obs, synthesize_measurements(truth));
  CHECK(innovation.pose.omega.norm() <= 1e-10);
  CHECK(innovation.pose.v.norm() <= 1e-10);
  for (const auto& dq : innovation.landmarks) {
    CHECK(dq.w.norm() <= 1e-11);
    CHECK(std::abs(dq.s) <= 1e-11);
  }
}

TEST_CASE("perfect initialisation tracks the true state at integration order") {
  // The frozen-generator step with the midpoint-evaluated lift leaves an
  // O(dt^2) class drift; at dt = 0.02 over 1 s the measured worst drift is
  // ~1.8e-6 (oracle-derived bound 4e-6), and halving dt shrinks it ~4x.
  auto worst_drift = [](double dt) {
    ScenarioConfig cfg;
    TotalState truth = initial_truth(cfg);
    const Twist u(cfg.angular_velocity, cfg.linear_velocity);
    ObserverState obs = ObserverState::initialize(
        TotalState(truth.pose(), truth.landmarks()), cfg.gains);
    double worst = 0.0;
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < steps; ++k) {
      obs = observer_step(obs, u, synthesize_measurements(truth), dt);
      truth = propagate_truth(truth, u, dt);
      const TotalState est = estimated_state(obs);
      worst = std::max(worst, (est.pose().matrix() - truth.pose().matrix()).norm());
      for (std::size_t j = 0; j < truth.size(); ++j) {
        worst = std::max(worst, est.landmarks()[j].class_distance(truth.landmarks()[j]));
      }
    }
    return worst;
  };
  const double coarse = worst_drift(0.02);
  const double fine = worst_drift(0.01);
  CHECK(coarse <= 4e-6);
  CHECK(fine <= coarse / 2.8);
}

TEST_CASE("static single point landmark: body-frame error decreases monotonically") {
  // mostly transverse perturbation: without robot motion only the measured
  // directions contract, the depth component has no excitation and persists
  const TotalState truth(Pose::identity(), {embed_point(Vec3(0, 0, 3))});
  const std::vector<Vec3> eps = {Vec3(0.4, -0.3, 0.0)};
  ObserverState obs = ObserverState::initialize(build_reference(truth, eps), GainConfig{});
  const Twist u;  // static robot
  const std::vector<Bearing> y = synthesize_measurements(truth);
  double prev = std::numeric_limits<double>::infinity();
  double first = 0.0;
  for (int k = 0; k < 500; ++k) {
    const TotalState est = estimated_state(obs);
    const double err = (unembed_point(transform(est.pose().inverse().matrix(), est.landmarks()[0])) -
                        unembed_point(transform(truth.pose().inverse().matrix(), truth.landmarks()[0])))
                           .norm();
    if (k == 0) first = err;
    CHECK(err <= prev + 1e-12);
    prev = err;
    obs = observer_step(obs, u, y, 0.02);
  }
  CHECK(prev < 0.9 * first);  // the measured component actually contracted
}

TEST_CASE("observer step is deterministic and checks its inputs") {
  oracles::Rng rng(48);
  ObserverState obs = small_observer(rng, 2, 1);
  const Twist u(Vec3(0, 0, -0.5), Vec3(1.5, 0, 0));
  const TotalState truth = rng.total_state(2, 1);
  const std::vector<Bearing> y = synthesize_measurements(truth);

  const ObserverState a = observer_step(obs, u, y, 0.02);
  const ObserverState b = observer_step(obs, u, y, 0.02);
  CHECK((a.group_state.pose.matrix() - b.group_state.pose.matrix()).norm() == 0.0);
  for (std::size_t i = 0; i < a.sigma.size(); ++i) {
    CHECK((a.sigma[i] - b.sigma[i]).norm() == 0.0);
  }

  CHECK_THROWS_AS(observer_step(obs, u, std::vector<Bearing>{y[0]}, 0.02), DimensionMismatch);
  CHECK_THROWS_AS(observer_step(obs, u, y, 0.0), ValidationError);
  CHECK_THROWS_AS(observer_step(obs, u, y, 10.0), RiccatiBlowup);  // sigma0 = 25 collapses
}

TEST_CASE("observer step commutes with landmark relabelling within each block") {
  oracles::Rng rng(49);
  const TotalState truth = rng.total_state(3, 2);
  std::vector<Vec3> eps;
  for (std::size_t i = 0; i < truth.size(); ++i) eps.push_back(rng.vec3(0.08));
  ObserverState obs = ObserverState::initialize(build_reference(truth, eps), GainConfig{});
  const Twist u(Vec3(0.1, 0.0, -0.4), Vec3(1.0, 0.2, 0.0));
  const std::vector<Bearing> y = synthesize_measurements(truth);

  // run a few steps so the sigma matrices differentiate
  for (int k = 0; k < 5; ++k) obs = observer_step(obs, u, y, 0.02);

  // permutation keeping points in point slots and bearings in bearing slots
  const std::vector<std::size_t> perm = {2, 0, 1, 4, 3};
  std::vector<ProjectivePoint> ref_perm;
  std::vector<ScaledRotation> q_perm;
  std::vector<Mat3> sigma_perm;
  std::vector<Bearing> y_perm;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    ref_perm.push_back(obs.reference.landmarks()[perm[i]]);
    q_perm.push_back(obs.group_state.landmarks[perm[i]]);
    y_perm.push_back(y[perm[i]]);
    if (i < 3) sigma_perm.push_back(obs.sigma[perm[i]]);
  }
  GroupElement g_perm;
  g_perm.pose = obs.group_state.pose;
  g_perm.landmarks = q_perm;
  const ObserverState permuted{g_perm, sigma_perm,
                               TotalState(obs.reference.pose(), ref_perm), obs.gains};

  const ObserverState next = observer_step(obs, u, y, 0.02);
  const ObserverState next_perm = observer_step(permuted, u, y_perm, 0.02);

  CHECK((next.group_state.pose.matrix() - next_perm.group_state.pose.matrix()).norm() <= 1e-10);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    CHECK((next.group_state.landmarks[perm[i]].matrix() -
           next_perm.group_state.landmarks[i].matrix())
              .norm() <= 1e-10);
    if (i < 3) {
      CHECK((next.sigma[perm[i]] - next_perm.sigma[i]).norm() <= 1e-10);
    }
  }
}

TEST_CASE("observer step is invariant to representative signs and prenormalisation scales") {
  oracles::Rng rng(50);
  const TotalState truth = rng.total_state(2, 1);
  std::vector<Vec3> eps;
  for (std::size_t i = 0; i < truth.size(); ++i) eps.push_back(rng.vec3(0.08));
  const TotalState reference = build_reference(truth, eps);
  const Twist u(Vec3(0.1, -0.2, 0.3), Vec3(0.5, 0.0, -0.2));
  const std::vector<Bearing> y = synthesize_measurements(truth);

  // rebuild the reference and measurements from rescaled/sign-flipped raw vectors
  std::vector<ProjectivePoint> ref_scaled;
  for (const auto& landmark : reference.landmarks()) {
    ref_scaled.push_back(
        ProjectivePoint::from_homogeneous(Vec4(rng.nonzero_scale(5.0) * landmark.rep())));
  }
  std::vector<Bearing> y_scaled;
  for (const auto& b : y) {
    y_scaled.push_back(Bearing(Vec3(rng.nonzero_scale(5.0) * b.rep())));
  }

  const ObserverState obs = ObserverState::initialize(reference, GainConfig{});
  const ObserverState obs_scaled =
      ObserverState::initialize(TotalState(reference.pose(), ref_scaled), GainConfig{});

  const ObserverState next = observer_step(obs, u, y, 0.02);
  const ObserverState next_scaled = observer_step(obs_scaled, u, y_scaled, 0.02);

  CHECK((next.group_state.pose.matrix() - next_scaled.group_state.pose.matrix()).norm() <= 1e-12);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK((next.group_state.landmarks[i].matrix() -
           next_scaled.group_state.landmarks[i].matrix())
              .norm() <= 1e-12);
  }
  for (std::size_t i = 0; i < next.sigma.size(); ++i) {
    CHECK((next.sigma[i] - next_scaled.sigma[i]).norm() <= 1e-12);
  }
  // the estimated landmark classes agree as classes
  const TotalState est = estimated_state(next);
  const TotalState est_scaled = estimated_state(next_scaled);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(est.landmarks()[i].class_distance(est_scaled.landmarks()[i]) <= 1e-12);
  }
}

TEST_CASE("bearing storage is stationary exactly at agreement and at orthogonality") {
  const GainConfig gains;
  const Bearing y(Vec3(0, 0, 1));
  // orthogonal predicted direction: the angular correction vanishes
  const ScaledRotationTangent at_orth =
      landmark_innovation(Bearing(Vec3(1, 0, 0)), y, Mat3::Identity(), gains, Kind::Bearing);
  CHECK(at_orth.w.norm() <= 1e-15);
  CHECK(std::abs(at_orth.s + gains.k) <= 1e-15);  // scale part is -k at orthogonality
  // parallel: everything vanishes
  const ScaledRotationTangent at_par =
      landmark_innovation(y, y, Mat3::Identity(), gains, Kind::Bearing);
  CHECK(at_par.w.norm() <= 1e-12);
  CHECK(std::abs(at_par.s) <= 1e-12);
  // generic angle: the angular correction is non-zero
  const ScaledRotationTangent generic = landmark_innovation(
      Bearing(Vec3(std::sqrt(0.5), 0, std::sqrt(0.5))), y, Mat3::Identity(), gains, Kind::Bearing);
  CHECK(generic.w.norm() > 1e-3);
}

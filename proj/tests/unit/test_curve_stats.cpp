#include <doctest.h>

#include <numbers>
#include <random>

#include "geoflow/curve.hpp"
#include "geoflow/presets.hpp"
#include "geoflow/stats.hpp"
#include "oracles.hpp"

using namespace geoflow;

TEST_CASE("center_curve splits off the mean") {
  CurveSpec c = circle_curve();
  CenteredCurve cc = center_curve(c);
  CHECK(cc.drift.norm() == 0.0);
  CHECK(cc.curve.mean.norm() == 0.0);

  // gamma(s) = (1 + cos s, sin s): centered part is the circle, drift (1,0)
  CurveSpec shifted = circle_curve();
  shifted.mean = Eigen::Vector2d(1, 0);
  CenteredCurve cs = center_curve(shifted);
  CHECK(cs.drift == Eigen::Vector2d(1, 0));
  for (double s : {0.0, 0.4, 2.2}) {
    CHECK((cs.curve.eval(s) - Eigen::Vector2d(std::cos(s), std::sin(s))).norm() < 1e-15);
  }
}

TEST_CASE("sigma_matrix closed forms") {
  // circle: phi' = (sin s, -cos s), Parseval gives diag(1/2, 1/2)
  Eigen::MatrixXd s1 = sigma_matrix(circle_curve());
  CHECK(s1(0, 0) == doctest::Approx(0.5));
  CHECK(s1(1, 1) == doctest::Approx(0.5));
  CHECK(std::abs(s1(0, 1)) < 1e-15);

  // single mode (A cos s, 0): diag(A^2/2, 0)
  CurveSpec single;
  single.dim = 2;
  single.period = 2.0 * std::numbers::pi;
  single.mean = Eigen::Vector2d::Zero();
  single.cos_coef = {Eigen::Vector2d(3.0, 0.0)};
  single.sin_coef = {Eigen::Vector2d::Zero()};
  Eigen::MatrixXd s2 = sigma_matrix(single);
  CHECK(s2(0, 0) == doctest::Approx(4.5));
  CHECK(s2(1, 1) == 0.0);

  // zero curve
  CurveSpec zero;
  zero.dim = 2;
  zero.period = 1.0;
  zero.mean = Eigen::Vector2d::Zero();
  CHECK(sigma_matrix(zero).norm() == 0.0);

  // non-centered input is rejected
  CurveSpec off = circle_curve();
  off.mean = Eigen::Vector2d(0.1, 0);
  CHECK_THROWS_AS(sigma_matrix(off), std::invalid_argument);
}

TEST_CASE("sigma_matrix quadrature cross-check and symmetry") {
  CurveSpec c;
  c.dim = 2;
  c.period = 3.0;
  c.mean = Eigen::Vector2d::Zero();
  c.cos_coef = {Eigen::Vector2d(1.0, -0.4), Eigen::Vector2d(0.2, 0.9)};
  c.sin_coef = {Eigen::Vector2d(0.3, 0.8), Eigen::Vector2d(-0.5, 0.1)};
  Eigen::MatrixXd sig = sigma_matrix(c);
  CHECK((sig - sig.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sig);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);

  // oracle: trapezoid quadrature of (1/l) int phi' phi'^T with phi' summed termwise
  const double l = c.period;
  const int N = 20000;
  Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < N; ++i) {
    const double s = l * i / N;
    Eigen::Vector2d phip = Eigen::Vector2d::Zero();
    for (std::size_t k = 0; k < c.cos_coef.size(); ++k) {
      const double w = 2.0 * std::numbers::pi * (k + 1) / l;
      phip += c.cos_coef[k] * std::sin(w * s) / w - c.sin_coef[k] * std::cos(w * s) / w;
    }
    quad += phip * phip.transpose();
  }
  quad /= N;
  CHECK((sig - quad).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("sigma_matrix is invariant under phase shifts of the parametrization") {
  CurveSpec c;
  c.dim = 2;
  c.period = 2.0 * std::numbers::pi;
  c.mean = Eigen::Vector2d::Zero();
  c.cos_coef = {Eigen::Vector2d(1.0, 0.2), Eigen::Vector2d(0.0, 0.7)};
  c.sin_coef = {Eigen::Vector2d(0.5, -0.3), Eigen::Vector2d(0.4, 0.0)};
  Eigen::MatrixXd base = sigma_matrix(c);
  for (double shift : {0.3, 1.7, 4.0}) {
    CurveSpec d = c;
    for (std::size_t k = 0; k < c.cos_coef.size(); ++k) {
      const double w = (k + 1) * 1.0;
      d.cos_coef[k] = std::cos(w * shift) * c.cos_coef[k] + std::sin(w * shift) * c.sin_coef[k];
      d.sin_coef[k] = -std::sin(w * shift) * c.cos_coef[k] + std::cos(w * shift) * c.sin_coef[k];
    }
    // d(s) = c(s + shift): same curve traversed with an offset
    CHECK((d.eval(1.1) - c.eval(1.1 + shift)).norm() < 1e-12);
    CHECK((sigma_matrix(d) - base).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("center then sigma is invariant under constant offsets") {
  CurveSpec c = circle_curve();
  Eigen::MatrixXd base = sigma_matrix(center_curve(c).curve);
  c.mean = Eigen::Vector2d(-2.0, 5.0);
  CHECK((sigma_matrix(center_curve(c).curve) - base).norm() == 0.0);
}

TEST_CASE("ks distance: exact uniform grid has tiny distance, shifted law is caught") {
  std::vector<double> u;
  const int n = 10000;
  for (int i = 0; i < n; ++i) u.push_back((i + 0.5) / n);
  CHECK(ks_distance_uniform(u) <= 0.5 / n + 1e-12);
  CHECK(kolmogorov_pvalue(0.001, n) > 0.99);
  CHECK(kolmogorov_pvalue(0.05, n) < 1e-10);
}

TEST_CASE("gibbs marginal test passes on exact target samples and fails on a shifted law") {
  Preset p = make_preset("so3_euclid");
  const double nu = 1.0, eps = 1.0;          // beta = 2
  const double sd = std::sqrt(1.0 / 2.0);    // z ~ N(0, I/beta)
  std::mt19937_64 eng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> zs, zs_shifted;
  for (int i = 0; i < 50000; ++i) {
    Eigen::Vector3d z(sd * gauss(eng), sd * gauss(eng), sd * gauss(eng));
    zs.push_back(z);
    zs_shifted.push_back(z + Eigen::Vector3d(0.5, 0, 0));
  }
  GibbsReport ok = gibbs_marginal_test(zs, nu, eps, p.num);
  CHECK(ok.beta == doctest::Approx(2.0));
  CHECK(ok.pass);
  GibbsReport bad = gibbs_marginal_test(zs_shifted, nu, eps, p.num);
  CHECK_FALSE(bad.pass);

  // beta scaling: eps = 2 at nu = 1 gives beta = 1/2
  GibbsReport half = gibbs_marginal_test(zs, 1.0, 2.0, p.num, 1.0);
  CHECK(half.beta == doctest::Approx(0.5));

  CHECK_THROWS_AS(gibbs_marginal_test({zs[0]}, nu, eps, p.num), std::invalid_argument);
}

TEST_CASE("haar uniformity: QR-sampled rotations pass, a point mass fails") {
  std::mt19937_64 eng(77);
  std::vector<std::vector<Eigen::Matrix3d>> paths(32);
  for (auto& path : paths)
    for (int i = 0; i < 400; ++i) path.push_back(oracles::haar_so3(eng));
  HaarReport rep = haar_uniformity_test(paths);
  CHECK(rep.pass);
  CHECK(rep.n_samples == 32 * 400);

  std::vector<std::vector<Eigen::Matrix3d>> frozen(4);
  for (auto& path : frozen) path.assign(50, Eigen::Matrix3d::Identity());
  HaarReport stuck = haar_uniformity_test(frozen);
  CHECK_FALSE(stuck.pass);  // mean entry 1 with zero spread

  CHECK_THROWS_AS(haar_uniformity_test({{Eigen::Matrix3d::Identity()}}), std::invalid_argument);
}

TEST_CASE("jackknife covariance: correct on synthetic data, errors shrink like 1/sqrt(N)") {
  std::mt19937_64 eng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](int n) {
    std::vector<Eigen::VectorXd> v;
    for (int i = 0; i < n; ++i) {
      const double x = gauss(eng), y = gauss(eng);
      v.push_back(Eigen::Vector2d(2.0 * x, x + y));  // cov = [[4,2],[2,2]]
    }
    return v;
  };
  CovarianceEstimate small = covariance_with_jackknife(draw(2000));
  CovarianceEstimate large = covariance_with_jackknife(draw(32000));
  CHECK(small.cov(0, 0) == doctest::Approx(4.0).epsilon(0.15));
  CHECK(large.cov(0, 1) == doctest::Approx(2.0).epsilon(0.05));
  // each entry should sit within ~4 jackknife SEs of the truth
  Eigen::Matrix2d truth;
  truth << 4, 2, 2, 2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(large.cov(i, j) - truth(i, j)) < 4.0 * large.se(i, j));
  const double ratio = small.se(0, 0) / large.se(0, 0);
  CHECK(ratio > 2.5);  // sqrt(16) = 4 expected
  CHECK(ratio < 6.0);
  CHECK(covariance_with_jackknife(draw(50)).small_ensemble);
}

TEST_CASE("rescaled displacements read the right records") {
  TrajectoryEnsemble e;
  e.group_dim = 2;
  e.state_dim = 1;
  PathRecord p;
  p.t = {0.0, 4.0};
  p.group = {1.0, 2.0, 5.0, 0.0};  // displacement (4, -2), / sqrt(4) = (2, -1)
  p.state = {0.0, 0.0};
  e.paths = {p};
  auto d = rescaled_displacements(e);
  REQUIRE(d.size() == 1);
  CHECK(d[0](0) == doctest::Approx(2.0));
  CHECK(d[0](1) == doctest::Approx(-1.0));
}

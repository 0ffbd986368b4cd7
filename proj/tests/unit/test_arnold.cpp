#include <doctest.h>

#include <random>

#include "geoflow/arnold.hpp"
#include "geoflow/presets.hpp"

using namespace geoflow;

TEST_CASE("arnold form on euclidean so3 is the cross product, so qsym vanishes") {
  Preset p = make_preset("so3_euclid");
  ArnoldForm<double> f = arnold_form(p.num);
  std::mt19937 eng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    Vec<double> z(3), x(3);
    for (int i = 0; i < 3; ++i) {
      z[i] = u(eng);
      x[i] = u(eng);
    }
    // oracle: the cross-product triple-product identity ([x,y],z) = (z X x, y)
    Vec<double> qt = f.qtilde_apply(z, x);
    Vec<double> cross = {z[1] * x[2] - z[2] * x[1], z[2] * x[0] - z[0] * x[2],
                         z[0] * x[1] - z[1] * x[0]};
    for (int i = 0; i < 3; ++i) CHECK(qt[i] == doctest::Approx(cross[i]).epsilon(1e-13));
  }
  for (double v : f.qsym) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("arnold form on so3_rigid reproduces the classical Euler top") {
  const double I1 = 1, I2 = 2, I3 = 3;
  Preset p = make_preset("so3_rigid", {Rat(1), Rat(2), Rat(3)});
  ArnoldForm<double> f = arnold_form(p.num);
  std::mt19937 eng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    Vec<double> z(3);
    for (auto& v : z) v = u(eng);
    Vec<double> rhs = euler_arnold_rhs(z, f);
    // oracle: textbook rigid-body equations assembled independently
    CHECK(rhs[0] == doctest::Approx((I2 - I3) / I1 * z[1] * z[2]).epsilon(1e-12));
    CHECK(rhs[1] == doctest::Approx((I3 - I1) / I2 * z[2] * z[0]).epsilon(1e-12));
    CHECK(rhs[2] == doctest::Approx((I1 - I2) / I3 * z[0] * z[1]).epsilon(1e-12));
  }
}

TEST_CASE("euler_arnold_rhs concrete values") {
  // so3_rigid(1,2,3), z = e2+e3: only the a1 z2 z3 term fires, a1 = (2-3)/1
  Preset p = make_preset("so3_rigid", {Rat(1), Rat(2), Rat(3)});
  ArnoldForm<double> f = arnold_form(p.num);
  Vec<double> rhs = euler_arnold_rhs(Vec<double>{0, 1, 1}, f);
  CHECK(rhs[0] == doctest::Approx(-1.0));
  CHECK(rhs[1] == doctest::Approx(0.0));
  CHECK(rhs[2] == doctest::Approx(0.0));

  Preset ab = make_preset("abelian", {Rat(4)});
  ArnoldForm<double> fa = arnold_form(ab.num);
  for (double v : euler_arnold_rhs(Vec<double>{1, -2, 3, 0.5}, fa)) CHECK(v == 0.0);
}

TEST_CASE("defining relation and symmetry hold for every preset") {
  for (const auto& spec : {"abelian(3)", "heisenberg3", "so3_euclid", "so3_rigid(1,2,3)",
                           "so3_rigid(2/3,1,7/2)", "affine2", "so3_plus_so3"}) {
    CAPTURE(spec);
    Preset p = parse_preset(spec);
    ArnoldForm<double> f = arnold_form(p.num);
    CHECK(arnold_defining_residual(p.num, f) < 1e-12);
    const int n = f.dim;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(f.qs_at(k, i, j) == f.qs_at(k, j, i));

    // exact mode: the defining relation is an identity over Q
    ArnoldForm<Rat> fe = arnold_form(p.exact);
    CHECK(scal::is_zero(arnold_defining_residual(p.exact, fe)));
  }
}

TEST_CASE("energy orthogonality <q(z,z),z>_g = 0 on random states") {
  std::mt19937 eng(23);
  std::uniform_real_distribution<double> u(-3, 3);
  for (const auto& spec : {"heisenberg3", "so3_euclid", "so3_rigid(1,2,3)", "affine2",
                           "so3_plus_so3"}) {
    CAPTURE(spec);
    Preset p = parse_preset(spec);
    ArnoldForm<double> f = arnold_form(p.num);
    const int n = p.num.dim;
    for (int trial = 0; trial < 1000; ++trial) {
      Vec<double> z(n);
      for (auto& v : z) v = u(eng);
      Vec<double> q = euler_arnold_rhs(z, f);
      CHECK(std::abs(p.num.inner(q, z)) <= 1e-12 * (1.0 + std::abs(p.num.inner(z, z))));
    }
  }
}

TEST_CASE("arnold_form rejects a singular metric") {
  LieAlgebra<double> alg(2);
  alg.g_at(0, 0) = 1;
  alg.g_at(1, 1) = 0;  // singular
  CHECK_THROWS_AS(arnold_form(alg), std::invalid_argument);
}

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geoflow/curve.hpp"

namespace geoflow {

/// Periodic grid for the abelian reduction
///   f_t + z^k(s) df/da^k = (eps^2/2) d^2 f / ds^2
/// on T^{n_a} x S^1, n_a <= 2. Layout: s slowest, then a2, then a1.
struct FPGrid {
  int n_a = 1;
  std::vector<int> a_res;        // Na1 (, Na2)
  std::vector<double> a_period;  // defaults to 2 pi each
  int s_res = 64;
  double s_period = 0;
  std::vector<double> f;

  static FPGrid make(int n_a, std::vector<int> a_res, int s_res, double s_period,
                     std::vector<double> a_period = {});

  std::size_t cells() const { return f.size(); }
  double cell_volume() const;
  double mass() const;
  double l2_total() const;    // int f^2
  double l2_fluct() const;    // int (f - fbar)^2
  double s_grad_sq() const;   // int |df/ds|^2 (centered differences)
  double min_value() const;

  void fill_constant(double value);
  /// f0 = base + amp * sin(2 pi a1 / period)
  void fill_sin_a1(double base, double amp);
  void fill(const std::function<double(const std::vector<double>&, double)>& f0);  // (a coords, s)
};

struct FPSolveOptions {
  double cfl = 0.9;
  double dt_override = 0;  // 0 = derive from CFL; larger than the bound is an error
  int series_stride = 1;   // record the monitors every k-th step
};

struct FPRunResult {
  double dt = 0;
  int steps = 0;
  std::vector<double> t, mass, l2_total, l2_fluct, dissipation;  // dissipation = eps^2 int |f_s|^2
  double min_f = 0;
  double max_mass_drift = 0;  // max |mass - mass0| / mass0 over the run
};

/// Conservative first-order upwind transport in a, centered second difference
/// in s, explicit Euler in time under the stated CFL bound. Monotone and
/// positivity preserving, so the L2 fluctuation decays stepwise.
FPRunResult fp_solve_torus(FPGrid& grid, const CurveSpec& curve, double eps, double t_final,
                           const FPSolveOptions& opts = {});

struct L2Monitor {
  std::vector<double> t_mid, dl2_dt, minus_dissipation;
};

/// Discrete d/dt of int f^2 next to the analytic decay rate -eps^2 int |f_s|^2.
L2Monitor l2_monitor(const FPRunResult& r);

void write_density_csv(const FPGrid& grid, double time, const std::string& path);

}  // namespace geoflow

#include "geoflow/fpsolver.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace geoflow {

FPGrid FPGrid::make(int n_a, std::vector<int> a_res, int s_res, double s_period,
                    std::vector<double> a_period) {
  if (n_a < 1 || n_a > 2) throw std::invalid_argument("fp grid: n_a must be 1 or 2");
  if (static_cast<int>(a_res.size()) != n_a) throw std::invalid_argument("fp grid: a_res size mismatch");
  for (int r : a_res)
    if (r < 4 || (r & (r - 1)) != 0) throw std::invalid_argument("fp grid: resolutions must be powers of two (>= 4)");
  if (s_res < 4 || (s_res & (s_res - 1)) != 0)
    throw std::invalid_argument("fp grid: resolutions must be powers of two (>= 4)");
  if (!(s_period > 0)) throw std::invalid_argument("fp grid: s_period must be positive");
  FPGrid g;
  g.n_a = n_a;
  g.a_res = std::move(a_res);
  g.s_res = s_res;
  g.s_period = s_period;
  g.a_period = a_period.empty() ? std::vector<double>(n_a, 2.0 * std::numbers::pi) : std::move(a_period);
  std::size_t cells = static_cast<std::size_t>(s_res);
  for (int r : g.a_res) cells *= static_cast<std::size_t>(r);
  g.f.assign(cells, 0.0);
  return g;
}

double FPGrid::cell_volume() const {
  double v = s_period / s_res;
  for (int k = 0; k < n_a; ++k) v *= a_period[k] / a_res[k];
  return v;
}

double FPGrid::mass() const {
  double acc = 0;
  for (double x : f) acc += x;
  return acc * cell_volume();
}

double FPGrid::l2_total() const {
  double acc = 0;
  for (double x : f) acc += x * x;
  return acc * cell_volume();
}

double FPGrid::l2_fluct() const {
  double mean = 0;
  for (double x : f) mean += x;
  mean /= static_cast<double>(f.size());
  double acc = 0;
  for (double x : f) acc += (x - mean) * (x - mean);
  return acc * cell_volume();
}

double FPGrid::s_grad_sq() const {
  const int ns = s_res;
  const std::size_t slice = f.size() / ns;
  const double hs = s_period / ns;
  double acc = 0;
  for (int is = 0; is < ns; ++is) {
    const std::size_t up = static_cast<std::size_t>((is + 1) % ns) * slice;
    const std::size_t dn = static_cast<std::size_t>((is - 1 + ns) % ns) * slice;
    for (std::size_t c = 0; c < slice; ++c) {
      const double d = (f[up + c] - f[dn + c]) / (2.0 * hs);
      acc += d * d;
    }
  }
  return acc * cell_volume();
}

double FPGrid::min_value() const {
  double m = f.empty() ? 0.0 : f[0];
  for (double x : f) m = std::min(m, x);
  return m;
}

void FPGrid::fill_constant(double value) { f.assign(f.size(), value); }

void FPGrid::fill_sin_a1(double base, double amp) {
  const int na1 = a_res[0];
  const int na2 = n_a == 2 ? a_res[1] : 1;
  const double h1 = a_period[0] / na1;
  for (int is = 0; is < s_res; ++is)
    for (int i2 = 0; i2 < na2; ++i2)
      for (int i1 = 0; i1 < na1; ++i1)
        f[(static_cast<std::size_t>(is) * na2 + i2) * na1 + i1] =
            base + amp * std::sin(2.0 * std::numbers::pi * i1 * h1 / a_period[0]);
}

void FPGrid::fill(const std::function<double(const std::vector<double>&, double)>& f0) {
  const int na1 = a_res[0];
  const int na2 = n_a == 2 ? a_res[1] : 1;
  std::vector<double> a(n_a, 0.0);
  for (int is = 0; is < s_res; ++is) {
    const double s = s_period * is / s_res;
    for (int i2 = 0; i2 < na2; ++i2) {
      if (n_a == 2) a[1] = a_period[1] * i2 / na2;
      for (int i1 = 0; i1 < na1; ++i1) {
        a[0] = a_period[0] * i1 / na1;
        f[(static_cast<std::size_t>(is) * na2 + i2) * na1 + i1] = f0(a, s);
      }
    }
  }
}

FPRunResult fp_solve_torus(FPGrid& grid, const CurveSpec& curve, double eps, double t_final,
                           const FPSolveOptions& opts) {
  curve.check();
  if (curve.dim != grid.n_a)
    throw std::invalid_argument("fp solve: curve dimension must match the grid's a-dimensions");
  if (!(t_final > 0)) throw std::invalid_argument("fp solve: t_final must be positive");

  const int ns = grid.s_res;
  const int na1 = grid.a_res[0];
  const int na2 = grid.n_a == 2 ? grid.a_res[1] : 1;
  const double h1 = grid.a_period[0] / na1;
  const double h2 = grid.n_a == 2 ? grid.a_period[1] / na2 : 1.0;
  const double hs = grid.s_period / ns;
  const double diff = 0.5 * eps * eps;

  // velocity of each s-slice
  std::vector<double> v1(ns), v2(ns, 0.0);
  double vmax_sum = 0;
  for (int is = 0; is < ns; ++is) {
    Eigen::VectorXd z = curve.eval(grid.s_period * is / ns);
    v1[is] = z(0);
    if (grid.n_a == 2) v2[is] = z(1);
    vmax_sum = std::max(vmax_sum, std::abs(v1[is]) / h1 + std::abs(v2[is]) / h2);
  }

  const double cfl_denom = vmax_sum + 2.0 * diff / (hs * hs);
  const double dt_bound = cfl_denom > 0 ? opts.cfl / cfl_denom : t_final;
  double dt = opts.dt_override > 0 ? opts.dt_override : dt_bound;
  if (dt > dt_bound * (1.0 + 1e-12))
    throw std::invalid_argument("fp solve: requested dt violates the CFL bound");
  int steps = std::max(1, static_cast<int>(std::ceil(t_final / dt)));
  dt = t_final / steps;

  FPRunResult res;
  res.dt = dt;
  res.steps = steps;
  res.min_f = grid.min_value();
  const double mass0 = grid.mass();

  auto record = [&](double t) {
    res.t.push_back(t);
    res.mass.push_back(grid.mass());
    res.l2_total.push_back(grid.l2_total());
    res.l2_fluct.push_back(grid.l2_fluct());
    res.dissipation.push_back(eps * eps * grid.s_grad_sq());
    if (mass0 != 0)
      res.max_mass_drift = std::max(res.max_mass_drift, std::abs(res.mass.back() - mass0) / std::abs(mass0));
  };
  record(0.0);

  std::vector<double> fn(grid.f.size());
  const std::size_t slice = static_cast<std::size_t>(na1) * na2;

  for (int step = 1; step <= steps; ++step) {
    const std::vector<double>& f = grid.f;
    for (int is = 0; is < ns; ++is) {
      const std::size_t base = static_cast<std::size_t>(is) * slice;
      const std::size_t up = static_cast<std::size_t>((is + 1) % ns) * slice;
      const std::size_t dn = static_cast<std::size_t>((is - 1 + ns) % ns) * slice;
      const double w1 = v1[is] / h1, w2 = v2[is] / h2;
      for (int i2 = 0; i2 < na2; ++i2) {
        const int i2p = (i2 + 1) % na2, i2m = (i2 - 1 + na2) % na2;
        for (int i1 = 0; i1 < na1; ++i1) {
          const int i1p = (i1 + 1) % na1, i1m = (i1 - 1 + na1) % na1;
          const std::size_t c = base + static_cast<std::size_t>(i2) * na1 + i1;
          const double fc = f[c];
          double adv = 0;
          adv += w1 >= 0 ? w1 * (fc - f[base + static_cast<std::size_t>(i2) * na1 + i1m])
                         : w1 * (f[base + static_cast<std::size_t>(i2) * na1 + i1p] - fc);
          if (na2 > 1)
            adv += w2 >= 0 ? w2 * (fc - f[base + static_cast<std::size_t>(i2m) * na1 + i1])
                           : w2 * (f[base + static_cast<std::size_t>(i2p) * na1 + i1] - fc);
          const double dss =
              (f[up + static_cast<std::size_t>(i2) * na1 + i1] - 2.0 * fc +
               f[dn + static_cast<std::size_t>(i2) * na1 + i1]) /
              (hs * hs);
          fn[c] = fc + dt * (diff * dss - adv);
        }
      }
    }
    grid.f.swap(fn);
    res.min_f = std::min(res.min_f, grid.min_value());
    if (step % opts.series_stride == 0 || step == steps) record(step * dt);
  }
  return res;
}

L2Monitor l2_monitor(const FPRunResult& r) {
  L2Monitor m;
  for (std::size_t i = 0; i + 1 < r.t.size(); ++i) {
    const double dt = r.t[i + 1] - r.t[i];
    if (!(dt > 0)) continue;
    m.t_mid.push_back(0.5 * (r.t[i] + r.t[i + 1]));
    m.dl2_dt.push_back((r.l2_total[i + 1] - r.l2_total[i]) / dt);
    m.minus_dissipation.push_back(-0.5 * (r.dissipation[i] + r.dissipation[i + 1]));
  }
  return m;
}

void write_density_csv(const FPGrid& grid, double time, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  std::fprintf(out, "# n_a=%d", grid.n_a);
  for (int k = 0; k < grid.n_a; ++k) std::fprintf(out, " Na%d=%d", k + 1, grid.a_res[k]);
  std::fprintf(out, " Ns=%d time=%.17g\n", grid.s_res, time);
  const int na1 = grid.a_res[0];
  const int na2 = grid.n_a == 2 ? grid.a_res[1] : 1;
  if (grid.n_a == 1)
    std::fprintf(out, "s,a1,f\n");
  else
    std::fprintf(out, "s,a2,a1,f\n");
  for (int is = 0; is < grid.s_res; ++is) {
    const double s = grid.s_period * is / grid.s_res;
    for (int i2 = 0; i2 < na2; ++i2)
      for (int i1 = 0; i1 < na1; ++i1) {
        const double fval = grid.f[(static_cast<std::size_t>(is) * na2 + i2) * na1 + i1];
        if (grid.n_a == 1)
          std::fprintf(out, "%.17g,%.17g,%.17g\n", s, grid.a_period[0] * i1 / na1, fval);
        else
          std::fprintf(out, "%.17g,%.17g,%.17g,%.17g\n", s, grid.a_period[1] * i2 / na2,
                       grid.a_period[0] * i1 / na1, fval);
      }
  }
  std::fclose(out);
}

}  // namespace geoflow

#include "geoflow/integrate.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "geoflow/rng.hpp"

namespace geoflow {

namespace {

// Allocation-free kernels for the hot loops.

void q_apply_into(const ArnoldForm<double>& f, const double* u, const double* v, double* out) {
  const int n = f.dim;
  const double* q = f.qsym.data();
  for (int k = 0; k < n; ++k) {
    double acc = 0;
    const double* qk = q + static_cast<std::size_t>(k) * n * n;
    for (int i = 0; i < n; ++i) {
      const double ui = u[i];
      if (ui == 0.0) continue;
      const double* qki = qk + static_cast<std::size_t>(i) * n;
      double inner = 0;
      for (int j = 0; j < n; ++j) inner += qki[j] * v[j];
      acc += ui * inner;
    }
    out[k] = acc;
  }
}

void bracket_into(const LieAlgebra<double>& alg, const double* x, const double* y, double* out) {
  const int n = alg.dim;
  for (int k = 0; k < n; ++k) {
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (int j = 0; j < n; ++j) acc += alg.c_at(k, i, j) * xi * y[j];
    }
    out[k] = acc;
  }
}

// dexpinv truncated for 4th order: z + [s,z]/2 + [s,[s,z]]/12
void dexpinv_into(const LieAlgebra<double>& alg, const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                  Eigen::VectorXd& tmp1, Eigen::VectorXd& tmp2, Eigen::VectorXd& out) {
  bracket_into(alg, s.data(), z.data(), tmp1.data());
  bracket_into(alg, s.data(), tmp1.data(), tmp2.data());
  out = z + 0.5 * tmp1 + (1.0 / 12.0) * tmp2;
}

struct Recorder {
  PathRecord rec;
  int stride = 1;
  int group_dim = 0;
  int state_dim = 0;

  Recorder(std::uint64_t path_id, int n_steps, int snapshots, int gdim, int sdim)
      : group_dim(gdim), state_dim(sdim) {
    rec.path_id = path_id;
    stride = std::max(1, snapshots > 0 ? n_steps / snapshots : 1);
    const int est = n_steps / stride + 2;
    rec.t.reserve(est);
    rec.group.reserve(static_cast<std::size_t>(est) * gdim);
    rec.state.reserve(static_cast<std::size_t>(est) * sdim);
  }

  bool due(int step, int n_steps) const { return step % stride == 0 || step == n_steps; }

  void push(double t, const GroupElement& a, const double* state) {
    rec.t.push_back(t);
    if (a.kind == GroupKind::Translation) {
      rec.group.insert(rec.group.end(), a.t.data(), a.t.data() + a.t.size());
    } else {
      for (int i = 0; i < a.m.rows(); ++i)
        for (int j = 0; j < a.m.cols(); ++j) rec.group.push_back(a.m(i, j));
    }
    rec.state.insert(rec.state.end(), state, state + state_dim);
  }
};

int group_flat_dim(const Preset& p) {
  if (p.group_kind == GroupKind::Translation) return p.num.dim;
  return static_cast<int>(p.rep[0].rows() * p.rep[0].cols());
}

}  // namespace

void LangevinConfig::check() const {
  if (!(dt > 0)) throw std::invalid_argument("langevin: dt must be positive");
  if (!(t_final > dt)) throw std::invalid_argument("langevin: need dt < t_final");
  if (nu < 0 || eps < 0) throw std::invalid_argument("langevin: nu and eps must be nonnegative");
  if (eps > 0 && (sigma.size() == 0 || sigma.norm() == 0))
    throw std::invalid_argument("langevin: eps > 0 requires a nonzero sigma");
  if (n_paths < 1) throw std::invalid_argument("langevin: n_paths must be at least 1");
}

void geodesic_step(GroupElement& a, Eigen::VectorXd& z, double dt, const Preset& p,
                   const ArnoldForm<double>& form, GeoScheme scheme) {
  const int n = form.dim;
  if (scheme == GeoScheme::LieEuler) {
    Eigen::VectorXd q(n);
    q_apply_into(form, z.data(), z.data(), q.data());
    advance_group(a, dt * z, p);
    z += dt * q;
  } else {
    // Munthe-Kaas RK4 on (sigma, z), a = a0 exp(sigma)
    Eigen::VectorXd t1(n), t2(n);
    Eigen::VectorXd k1s(n), k2s(n), k3s(n), k4s(n);
    Eigen::VectorXd k1z(n), k2z(n), k3z(n), k4z(n);
    Eigen::VectorXd zs(n), sg(n);

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    // stage 1 at sigma = 0
    k1s = z;
    q_apply_into(form, z.data(), z.data(), k1z.data());
    // stage 2
    sg = 0.5 * dt * k1s;
    zs = z + 0.5 * dt * k1z;
    dexpinv_into(p.num, sg, zs, t1, t2, k2s);
    q_apply_into(form, zs.data(), zs.data(), k2z.data());
    // stage 3
    sg = 0.5 * dt * k2s;
    zs = z + 0.5 * dt * k2z;
    dexpinv_into(p.num, sg, zs, t1, t2, k3s);
    q_apply_into(form, zs.data(), zs.data(), k3z.data());
    // stage 4
    sg = dt * k3s;
    zs = z + dt * k3z;
    dexpinv_into(p.num, sg, zs, t1, t2, k4s);
    q_apply_into(form, zs.data(), zs.data(), k4z.data());

    sg = (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    z += (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    advance_group(a, sg, p);
  }
  if (p.orthogonal_group) reorthonormalize(a);
}

PathRecord langevin_path(const LangevinConfig& cfg, const Preset& p, const ArnoldForm<double>& form,
                         const GroupElement& a0, const Eigen::VectorXd& z0, std::uint64_t path_id) {
  cfg.check();
  const int n = form.dim;
  const int r = cfg.eps > 0 ? static_cast<int>(cfg.sigma.cols()) : 0;
  const int n_steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
  const double sq_dt = std::sqrt(cfg.dt);

  PathRng rng(cfg.seed, path_id);
  GroupElement a = a0;
  Eigen::VectorXd z = z0;
  Eigen::VectorXd drift(n), noise(n), xi(std::max(r, 1));

  Recorder recorder(path_id, n_steps, cfg.snapshots, group_flat_dim(p), n);
  recorder.push(0.0, a, z.data());

  for (int step = 1; step <= n_steps; ++step) {
    q_apply_into(form, z.data(), z.data(), drift.data());
    drift -= cfg.nu * z;
    advance_group(a, cfg.dt * z, p);
    if (r > 0) {
      for (int l = 0; l < r; ++l) xi(l) = rng.normal();
      noise.noalias() = cfg.sigma * xi.head(r);
      z += cfg.dt * drift + cfg.eps * sq_dt * noise;
    } else {
      z += cfg.dt * drift;
    }
    if (p.orthogonal_group) reorthonormalize(a);
    if (z.cwiseAbs().maxCoeff() > cfg.blowup_bound) {
      recorder.rec.blown_up = true;
      recorder.rec.abort_reason = "blowup: |z| exceeded " + std::to_string(cfg.blowup_bound);
      recorder.push(step * cfg.dt, a, z.data());
      break;
    }
    if (recorder.due(step, n_steps)) recorder.push(step * cfg.dt, a, z.data());
  }
  return std::move(recorder.rec);
}

PathRecord constrained_path(const ZChart& chart, const ConstrainedConfig& cfg, const Preset& p,
                            const ArnoldForm<double>& form, const GroupElement& a0,
                            const Eigen::VectorXd& s0, std::uint64_t path_id) {
  if (!(cfg.dt > 0) || !(cfg.t_final > cfg.dt))
    throw std::invalid_argument("constrained: need 0 < dt < t_final");
  const int m = chart.param_dim;
  const int n_steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
  const double sq_dt = std::sqrt(cfg.dt);
  const double half_eps2 = 0.5 * cfg.eps * cfg.eps;

  double max_qs = 0;
  for (double v : form.qsym) max_qs = std::max(max_qs, std::abs(v));
  const bool drift_free = max_qs == 0.0;

  PathRng rng(cfg.seed, path_id);
  GroupElement a = a0;
  Eigen::VectorXd s = s0;
  if (cfg.randomize_start) {
    for (int j = 0; j < m; ++j) {
      const double period = chart.periods[j] > 0 ? chart.periods[j] : 1.0;
      s(j) = rng.uniform() * period;
    }
  }

  auto drift_at = [&](const Eigen::VectorXd& sc, bool& ok) -> Eigen::VectorXd {
    Eigen::VectorXd u = half_eps2 * chart.correction_or_fd(sc);
    if (!drift_free) {
      const Eigen::VectorXd z = chart.zeta(sc);
      Vec<double> zv(z.data(), z.data() + z.size());
      Vec<double> q = form.q_apply(zv, zv);
      Eigen::Map<Eigen::VectorXd> qe(q.data(), static_cast<int>(q.size()));
      if (qe.norm() > 0) {
        const Eigen::MatrixXd J = chart.jacobian_or_fd(sc);
        const Eigen::VectorXd c = J.colPivHouseholderQr().solve(qe);
        if ((qe - J * c).norm() > cfg.tangency_tol * std::max(1.0, qe.norm())) ok = false;
        u += c;
      }
    }
    return u;
  };

  Recorder recorder(path_id, n_steps, cfg.snapshots, group_flat_dim(p), m);
  recorder.push(0.0, a, s.data());

  if (chart.unit_metric && drift_free && chart.curve_data &&
      p.group_kind == GroupKind::Translation) {
    // h = 1 and no drift: the Heun step is literally s += eps dW. Same draws,
    // same arithmetic as the generic route, minus the callback layer.
    const CurveSpec& curve = *chart.curve_data;
    const double period = chart.periods[0];
    double sc = s(0);
    Eigen::VectorXd z(curve.dim);
    for (int step = 1; step <= n_steps; ++step) {
      curve.eval_into(sc, z);
      a.t += cfg.dt * z;
      sc += cfg.eps * (rng.normal() * sq_dt);
      sc = std::fmod(sc, period);
      if (sc < 0) sc += period;
      if (recorder.due(step, n_steps)) recorder.push(step * cfg.dt, a, &sc);
    }
    return std::move(recorder.rec);
  }

  Eigen::VectorXd xi(m), s_pred(m), s_new(m);
  for (int step = 1; step <= n_steps; ++step) {
    bool ok = true;
    const Eigen::VectorXd z_old = chart.zeta(s);
    const Eigen::VectorXd u0 = drift_at(s, ok);
    const Eigen::MatrixXd L0 = chart.noise_frame(s);
    for (int j = 0; j < m; ++j) xi(j) = rng.normal() * sq_dt;
    s_pred = s + cfg.dt * u0 + cfg.eps * (L0 * xi);
    const Eigen::VectorXd u1 = drift_at(s_pred, ok);
    const Eigen::MatrixXd L1 = chart.noise_frame(s_pred);
    s_new = s + 0.5 * cfg.dt * (u0 + u1) + 0.5 * cfg.eps * ((L0 + L1) * xi);
    chart.wrap(s_new);
    s = s_new;
    advance_group(a, cfg.dt * z_old, p);
    if (p.orthogonal_group) reorthonormalize(a);
    if (!ok) {
      recorder.rec.blown_up = true;
      recorder.rec.abort_reason = "chart invariance: drift not tangent to Z";
      recorder.push(step * cfg.dt, a, s.data());
      break;
    }
    if (recorder.due(step, n_steps)) recorder.push(step * cfg.dt, a, s.data());
  }
  return std::move(recorder.rec);
}

TrajectoryEnsemble ensemble_run(int n_paths, int n_threads,
                                const std::function<PathRecord(std::uint64_t)>& make_path) {
  if (n_paths < 1) throw std::invalid_argument("ensemble: n_paths must be at least 1");
  TrajectoryEnsemble e;
  e.paths.resize(n_paths);
  n_threads = std::max(1, std::min(n_threads, n_paths));
  if (n_threads == 1) {
    for (int i = 0; i < n_paths; ++i) e.paths[i] = make_path(static_cast<std::uint64_t>(i));
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t]() {
        for (int i = t; i < n_paths; i += n_threads)
          e.paths[i] = make_path(static_cast<std::uint64_t>(i));
      });
    }
    for (auto& th : pool) th.join();
  }
  return e;
}

void write_trajectory_csv(const TrajectoryEnsemble& e, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  std::fprintf(f, "time,path_id");
  for (int i = 0; i < e.group_dim; ++i) std::fprintf(f, ",%s%d", e.group_label.c_str(), i + 1);
  for (int i = 0; i < e.state_dim; ++i) std::fprintf(f, ",%s%d", e.state_label.c_str(), i + 1);
  std::fprintf(f, ",flag\n");
  for (const auto& p : e.paths) {
    for (int r = 0; r < p.records(); ++r) {
      std::fprintf(f, "%.17g,%llu", p.t[r], static_cast<unsigned long long>(p.path_id));
      for (int i = 0; i < e.group_dim; ++i)
        std::fprintf(f, ",%.17g", p.group[static_cast<std::size_t>(r) * e.group_dim + i]);
      for (int i = 0; i < e.state_dim; ++i)
        std::fprintf(f, ",%.17g", p.state[static_cast<std::size_t>(r) * e.state_dim + i]);
      std::fprintf(f, ",%d\n", p.blown_up && r == p.records() - 1 ? 1 : 0);
    }
  }
  std::fclose(f);
}

namespace {
constexpr char kMagic[4] = {'G', 'F', 'T', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void write_trajectory_binary(const TrajectoryEnsemble& e, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, static_cast<std::uint32_t>(e.paths.size()));
  put(os, static_cast<std::uint32_t>(e.group_dim));
  put(os, static_cast<std::uint32_t>(e.state_dim));
  put(os, e.dt);
  put(os, e.seed);
  for (const auto& p : e.paths) {
    put(os, p.path_id);
    put(os, static_cast<std::uint32_t>(p.records()));
    put(os, static_cast<std::uint8_t>(p.blown_up ? 1 : 0));
    os.write(reinterpret_cast<const char*>(p.t.data()), p.t.size() * sizeof(double));
    os.write(reinterpret_cast<const char*>(p.group.data()), p.group.size() * sizeof(double));
    os.write(reinterpret_cast<const char*>(p.state.data()), p.state.size() * sizeof(double));
  }
}

TrajectoryEnsemble read_trajectory_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("bad trajectory file magic");
  std::uint32_t version = 0, n_paths = 0, gdim = 0, sdim = 0;
  get(is, version);
  if (version != kVersion) throw std::runtime_error("unsupported trajectory file version");
  get(is, n_paths);
  get(is, gdim);
  get(is, sdim);
  TrajectoryEnsemble e;
  e.group_dim = static_cast<int>(gdim);
  e.state_dim = static_cast<int>(sdim);
  get(is, e.dt);
  get(is, e.seed);
  e.paths.resize(n_paths);
  for (auto& p : e.paths) {
    std::uint32_t nrec = 0;
    std::uint8_t blown = 0;
    get(is, p.path_id);
    get(is, nrec);
    get(is, blown);
    p.blown_up = blown != 0;
    p.t.resize(nrec);
    p.group.resize(static_cast<std::size_t>(nrec) * gdim);
    p.state.resize(static_cast<std::size_t>(nrec) * sdim);
    is.read(reinterpret_cast<char*>(p.t.data()), p.t.size() * sizeof(double));
    is.read(reinterpret_cast<char*>(p.group.data()), p.group.size() * sizeof(double));
    is.read(reinterpret_cast<char*>(p.state.data()), p.state.size() * sizeof(double));
  }
  if (!is) throw std::runtime_error("truncated trajectory file");
  return e;
}

}  // namespace geoflow

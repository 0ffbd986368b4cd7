// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
//
// Each criterion pins its tolerances in code; nothing is calibrated at run
// time. Runs single criteria via `acceptance <number...>`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geoflow/chart.hpp"
#include "geoflow/curve.hpp"
#include "geoflow/fpsolver.hpp"
#include "geoflow/group.hpp"
#include "geoflow/hull.hpp"
#include "geoflow/integrate.hpp"
#include "geoflow/presets.hpp"
#include "geoflow/stats.hpp"
#include "oracles.hpp"

using namespace geoflow;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& title, const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] criterion %2d (%6.1fs): %s%s%s\n", ok ? "PASS" : "FAIL", number, secs,
              title.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

Vec<Rat> e_exact(int n, int i) {
  Vec<Rat> v(n, Rat(0));
  v[i] = 1;
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// shared SO(3) Langevin ensemble for criteria 5 and 6
struct SharedRun {
  TrajectoryEnsemble ensemble;
  LangevinConfig cfg;
  Preset preset;
  bool ready = false;
};
SharedRun g_so3_run;

void make_so3_run() {
  if (g_so3_run.ready) return;
  g_so3_run.preset = make_preset("so3_euclid");
  ArnoldForm<double> form = arnold_form(g_so3_run.preset.num);
  LangevinConfig& cfg = g_so3_run.cfg;
  cfg.nu = 1.0;
  cfg.eps = 1.0;
  cfg.sigma = Eigen::MatrixXd::Identity(3, 3);
  cfg.dt = 2e-3;
  cfg.t_final = 1310.0;
  cfg.seed = 661870032ULL;
  cfg.n_paths = 96;
  cfg.snapshots = 1310;  // one record per unit time
  GroupElement a0 = GroupElement::identity(g_so3_run.preset);
  g_so3_run.ensemble = ensemble_run(cfg.n_paths, 2, [&](std::uint64_t id) {
    return langevin_path(cfg, g_so3_run.preset, form, a0, Eigen::Vector3d::Zero(), id);
  });
  g_so3_run.ensemble.group_dim = 9;
  g_so3_run.ensemble.state_dim = 3;
  g_so3_run.ready = true;
}

// criterion 7/8 ensemble on the abelian reduction
TrajectoryEnsemble diffusivity_run(double eps, std::uint64_t seed, int n_paths, double t_final) {
  Preset p = make_preset("abelian", {Rat(2)});
  ArnoldForm<double> form = arnold_form(p.num);
  ZChart chart = curve_chart(circle_curve());
  ConstrainedConfig cfg;
  cfg.eps = eps;
  cfg.dt = 0.02;
  cfg.t_final = t_final;
  cfg.seed = seed;
  cfg.n_paths = n_paths;
  cfg.snapshots = 1;  // endpoints only
  cfg.randomize_start = true;
  GroupElement a0 = GroupElement::identity(p);
  Eigen::VectorXd s0 = Eigen::VectorXd::Zero(1);
  TrajectoryEnsemble e = ensemble_run(n_paths, 2, [&](std::uint64_t id) {
    return constrained_path(chart, cfg, p, form, a0, s0, id);
  });
  e.group_dim = 2;
  e.state_dim = 1;
  e.dt = cfg.dt;
  e.seed = seed;
  return e;
}

bool covariance_matches(const CovarianceEstimate& est, const Eigen::Matrix2d& predicted,
                        double rel_tol, std::string& detail) {
  bool ok = !est.small_ensemble;
  double worst_rel = 0, worst_z = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (std::abs(predicted(i, j)) > 1e-12) {
        const double rel = std::abs(est.cov(i, j) - predicted(i, j)) / std::abs(predicted(i, j));
        worst_rel = std::max(worst_rel, rel);
        if (rel > rel_tol) ok = false;
      } else {
        const double z = std::abs(est.cov(i, j)) / est.se(i, j);
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ok = false;
      }
    }
  std::ostringstream os;
  os << "cov = [" << est.cov(0, 0) << ", " << est.cov(0, 1) << "; " << est.cov(1, 0) << ", "
     << est.cov(1, 1) << "], worst rel err " << worst_rel << " (tol " << rel_tol
     << "), offdiag |z| " << worst_z;
  detail = os.str();
  return ok;
}

// --------------------------------------------------------------------------

bool criterion1(std::string& detail) {
  const char* specs[] = {"abelian(2)", "abelian(3)", "abelian(4)", "heisenberg3",
                         "so3_euclid", "so3_rigid(1,2,3)", "affine2"};
  int cases = 0;
  for (const auto& spec : specs) {
    Preset p = parse_preset(spec);
    const int n = p.num.dim;
    ArnoldForm<double> fd = arnold_form(p.num);
    ArnoldForm<Rat> fr = arnold_form(p.exact);
    for (int mask = 1; mask < (1 << n); ++mask) {
      Forcing<double> fo;
      Forcing<Rat> fe;
      for (int i = 0; i < n; ++i)
        if (mask & (1 << i)) {
          Vec<double> col(n, 0.0);
          col[i] = 1.0;
          fo.columns.push_back(std::move(col));
          fe.columns.push_back(e_exact(n, i));
        }
      const Verdict vf = check_langevin_hormander(p.num, fd, fo).verdict;
      const HullReport<Rat> re = check_langevin_hormander(p.exact, fr, fe);
      const int oracle_rank = oracles::brute_force_q_closure_rank(fe.columns, fr);
      const Verdict vo = oracle_rank == n ? Verdict::Nondegenerate : Verdict::Degenerate;
      if (vf != re.verdict || re.verdict != vo || oracle_rank != re.closure.rank) {
        detail = std::string(spec) + " mask " + std::to_string(mask) + ": verdicts differ";
        return false;
      }
      ++cases;
    }
  }
  detail = std::to_string(cases) + " preset/forcing cases, float == exact == brute-force oracle";
  return true;
}

bool criterion2(std::string& detail) {
  Preset rb = make_preset("so3_rigid", {Rat(1), Rat(2), Rat(3)});
  ArnoldForm<Rat> fr = arnold_form(rb.exact);

  Forcing<Rat> e1;
  e1.columns = {e_exact(3, 0)};
  HullReport<Rat> r1 = check_langevin_hormander(rb.exact, fr, e1);
  if (r1.verdict != Verdict::Degenerate) return false;
  if (!r1.witness || r1.witness->rank != 1) return false;
  // witness is exactly span{e1}
  const Vec<Rat>& w = r1.witness->vectors.front();
  if (scal::is_zero(w[0]) || !scal::is_zero(w[1]) || !scal::is_zero(w[2])) return false;

  Forcing<Rat> diag;
  diag.columns = {Vec<Rat>{Rat(1), Rat(1), Rat(0)}};
  if (check_langevin_hormander(rb.exact, fr, diag).verdict != Verdict::Nondegenerate) return false;

  Preset two = make_preset("so3_plus_so3");
  ArnoldForm<Rat> f2 = arnold_form(two.exact);
  Forcing<Rat> first;
  first.columns = {e_exact(6, 0), e_exact(6, 1), e_exact(6, 2)};
  HullReport<Rat> r3 = check_langevin_hormander(two.exact, f2, first);
  if (r3.verdict != Verdict::Degenerate) return false;
  if (!r3.witness || r3.witness->rank != 3) return false;
  for (const auto& v : r3.witness->vectors)
    for (int i = 3; i < 6; ++i)
      if (!scal::is_zero(v[i])) return false;

  detail = "rigid(e1): degenerate span{e1}; rigid(e1+e2): nondegenerate; "
           "so3+so3 one summand: degenerate with the summand as witness";
  return true;
}

bool criterion3(std::string& detail) {
  Preset so3 = make_preset("so3_euclid");
  ZChart circ = circle_chart(Eigen::VectorXd::Zero(3), Eigen::Vector3d(1, 0, 0),
                             Eigen::Vector3d(0, 1, 0), 1.0);
  auto sampler = [&](int k) { return chart_low_discrepancy_samples(circ, k); };
  HullReport<double> r1 = check_constrained_hormander(sampler, so3.num);
  if (r1.verdict != Verdict::Nondegenerate || r1.closure.rank != 3) return false;

  if (p_hull<double>({Vec<double>{0.3, -0.7, 1.1}}, so3.num).rank != 0) return false;

  Preset ab3 = make_preset("abelian", {Rat(3)});
  HullReport<double> r2 = check_constrained_hormander(sampler, ab3.num);
  if (r2.verdict != Verdict::Degenerate) return false;
  if (!r2.witness || r2.witness->rank != 2) return false;
  // witness = the e1e2-plane: no e3 component
  for (const auto& v : r2.witness->vectors)
    if (std::abs(v[2]) > 1e-12) return false;

  detail = "circle in so(3): p-hull = so(3); singleton: zero; planar circle in R^3: rank-2 witness";
  return true;
}

bool criterion4(std::string& detail) {
  Preset p = make_preset("so3_rigid", {Rat(1), Rat(2), Rat(3)});
  ArnoldForm<double> form = arnold_form(p.num);
  const Eigen::Vector3d z0(0.5, 0.4, 0.3);
  const double T = 10.0;
  std::vector<double> dts = {1e-2, 5e-3, 2.5e-3}, de, dm;
  for (double dt : dts) {
    GroupElement a = GroupElement::identity(p);
    Eigen::VectorXd z = z0;
    Vec<double> zv(z.data(), z.data() + 3);
    const double e0 = energy(p.num, zv);
    const Eigen::VectorXd m0 = momentum(a, z, p);
    double e_drift = 0, m_drift = 0;
    const int steps = static_cast<int>(std::llround(T / dt));
    for (int s = 0; s < steps; ++s) {
      geodesic_step(a, z, dt, p, form);
      Vec<double> zz(z.data(), z.data() + 3);
      e_drift = std::max(e_drift, std::abs(energy(p.num, zz) - e0));
      m_drift = std::max(m_drift, (momentum(a, z, p) - m0).cwiseAbs().maxCoeff());
    }
    de.push_back(e_drift);
    dm.push_back(m_drift);
  }
  double min_order = 60;
  std::ostringstream os;
  os << "energy orders:";
  for (std::size_t i = 0; i + 1 < de.size(); ++i) {
    const double o = std::log2(de[i] / de[i + 1]);
    min_order = std::min(min_order, o);
    os << " " << o;
  }
  os << ", momentum orders:";
  for (std::size_t i = 0; i + 1 < dm.size(); ++i) {
    const double o = std::log2(dm[i] / dm[i + 1]);
    min_order = std::min(min_order, o);
    os << " " << o;
  }
  detail = os.str();
  return min_order >= 2.0;
}

bool criterion5(std::string& detail) {
  make_so3_run();
  std::vector<Eigen::VectorXd> zs = collect_states(g_so3_run.ensemble, 0.2);
  if (zs.size() < 100000) {
    detail = "only " + std::to_string(zs.size()) + " post-burn-in samples";
    return false;
  }
  GibbsReport rep = gibbs_marginal_test(zs, g_so3_run.cfg.nu, g_so3_run.cfg.eps,
                                        g_so3_run.preset.num, 0.01);
  std::ostringstream os;
  os << "beta = " << rep.beta << ", KS = " << rep.ks_distance << " (threshold 0.01, N = "
     << rep.n_samples << ")";
  detail = os.str();
  return rep.pass && rep.beta == 2.0;
}

bool criterion6(std::string& detail) {
  make_so3_run();
  HaarReport rep = haar_uniformity_test(collect_rotations(g_so3_run.ensemble, 0.2), 3.0);
  std::ostringstream os;
  os << "entry means worst |z| = " << rep.worst_mean_z << ", second moments worst |z| = "
     << rep.worst_second_z << " (limit 3, shared run with criterion 5)";
  detail = os.str();
  return rep.pass;
}

bool criterion7(std::string& detail) {
  TrajectoryEnsemble e = diffusivity_run(1.0, 855402119ULL, 10000, 1000.0);
  CovarianceEstimate est = effective_covariance(e);
  Eigen::Matrix2d predicted;
  predicted << 2.0, 0.0, 0.0, 2.0;  // (4/eps^2) diag(1/2, 1/2)
  return covariance_matches(est, predicted, 0.05, detail);
}

bool criterion8(std::string& detail) {
  TrajectoryEnsemble e = diffusivity_run(2.0, 220240405ULL, 10000, 1000.0);
  CovarianceEstimate est = effective_covariance(e);
  Eigen::Matrix2d predicted;
  predicted << 0.5, 0.0, 0.0, 0.5;  // factor-4 reduction
  return covariance_matches(est, predicted, 0.05, detail);
}

bool criterion9(std::string& detail) {
  // hypoelliptic case: gamma(s) = cos s drives everything to the mean
  CurveSpec cosc;
  cosc.dim = 1;
  cosc.period = 2.0 * std::numbers::pi;
  cosc.mean = Eigen::VectorXd::Zero(1);
  cosc.cos_coef = {Eigen::VectorXd::Ones(1)};
  cosc.sin_coef = {Eigen::VectorXd::Zero(1)};
  FPGrid g = FPGrid::make(1, {128}, 64, cosc.period);
  g.fill_sin_a1(1.0, 0.5);
  FPRunResult decay = fp_solve_torus(g, cosc, 1.0, 40.0);
  const double ratio = decay.l2_fluct.back() / decay.l2_fluct.front();
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < decay.l2_fluct.size(); ++i)
    monotone = monotone && decay.l2_fluct[i + 1] <= decay.l2_fluct[i] + 1e-14 * decay.l2_fluct[0];
  if (!(ratio < 1e-6) || !monotone || decay.max_mass_drift > 1e-12) {
    std::ostringstream os;
    os << "decay ratio " << ratio << (monotone ? "" : ", NOT monotone");
    detail = os.str();
    return false;
  }

  // transport-only counterexample: the sin(a1) mode only loses what the
  // scheme dissipates, and that loss shrinks under refinement
  CurveSpec unit;
  unit.dim = 1;
  unit.period = 2.0 * std::numbers::pi;
  unit.mean = Eigen::VectorXd::Ones(1);
  std::vector<double> losses;
  for (int na : {64, 128, 256}) {
    FPGrid gc = FPGrid::make(1, {na}, 8, unit.period);
    gc.fill_sin_a1(1.0, 1.0);
    FPRunResult r = fp_solve_torus(gc, unit, 1.0, 2.0 * std::numbers::pi);
    losses.push_back(1.0 - r.l2_fluct.back() / r.l2_fluct.front());
    if (r.max_mass_drift > 1e-12) return false;
  }
  const bool shrink =
      losses[0] > losses[1] && losses[1] > losses[2] && losses[2] < 0.5 * losses[0];
  std::ostringstream os;
  os << "decay ratio " << ratio << " (monotone), counterexample L2 loss by refinement: "
     << losses[0] << " -> " << losses[1] << " -> " << losses[2];
  detail = os.str();
  return shrink;
}

bool criterion10(std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "geoflow_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // langevin ensemble, 1 vs 2 workers and a repeat
  Preset p = make_preset("so3_euclid");
  ArnoldForm<double> form = arnold_form(p.num);
  LangevinConfig cfg;
  cfg.nu = 1.0;
  cfg.eps = 1.0;
  cfg.sigma = Eigen::MatrixXd::Identity(3, 3);
  cfg.dt = 1e-3;
  cfg.t_final = 3.0;
  cfg.seed = 12345;
  cfg.n_paths = 12;
  auto run_lang = [&](int threads, const std::string& name) {
    TrajectoryEnsemble e = ensemble_run(cfg.n_paths, threads, [&](std::uint64_t id) {
      return langevin_path(cfg, p, form, GroupElement::identity(p), Eigen::Vector3d::Zero(), id);
    });
    e.group_dim = 9;
    e.state_dim = 3;
    write_trajectory_csv(e, (dir / (name + ".csv")).string());
    write_trajectory_binary(e, (dir / (name + ".bin")).string());
  };
  run_lang(1, "lang_t1");
  run_lang(2, "lang_t2");
  run_lang(2, "lang_t2_again");

  // constrained ensemble, 1 vs 2 workers
  Preset ab = make_preset("abelian", {Rat(2)});
  ArnoldForm<double> fa = arnold_form(ab.num);
  ZChart chart = curve_chart(circle_curve());
  ConstrainedConfig ccfg;
  ccfg.eps = 1.0;
  ccfg.dt = 1e-2;
  ccfg.t_final = 5.0;
  ccfg.seed = 777;
  ccfg.n_paths = 10;
  ccfg.randomize_start = true;
  auto run_con = [&](int threads, const std::string& name) {
    TrajectoryEnsemble e = ensemble_run(ccfg.n_paths, threads, [&](std::uint64_t id) {
      return constrained_path(chart, ccfg, ab, fa, GroupElement::identity(ab),
                              Eigen::VectorXd::Zero(1), id);
    });
    e.group_dim = 2;
    e.state_dim = 1;
    write_trajectory_csv(e, (dir / (name + ".csv")).string());
  };
  run_con(1, "con_t1");
  run_con(2, "con_t2");

  const bool ok = slurp((dir / "lang_t1.csv").string()) == slurp((dir / "lang_t2.csv").string()) &&
                  slurp((dir / "lang_t1.bin").string()) == slurp((dir / "lang_t2.bin").string()) &&
                  slurp((dir / "lang_t2.csv").string()) ==
                      slurp((dir / "lang_t2_again.csv").string()) &&
                  slurp((dir / "con_t1.csv").string()) == slurp((dir / "con_t2.csv").string()) &&
                  !slurp((dir / "lang_t1.csv").string()).empty();
  fs::remove_all(dir);
  detail = "CSV and binary outputs byte-identical across worker counts and reruns";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto want = [&](int n) { return only.empty() || only.count(n) > 0; };

  if (want(1)) criterion(1, "float/exact/oracle verdict agreement on all small presets", criterion1);
  if (want(2)) criterion(2, "theorem-1 concrete degeneracy cases", criterion2);
  if (want(3)) criterion(3, "theorem-2 concrete p-hull cases", criterion3);
  if (want(4)) criterion(4, "geodesic conservation order >= 2 (energy, momentum)", criterion4);
  if (want(5)) criterion(5, "Gibbs momentum marginal, KS < 0.01 at beta = 2", criterion5);
  if (want(6)) criterion(6, "Haar uniformity of SO(3) positions (moment z-scores <= 3)", criterion6);
  if (want(7)) criterion(7, "effective covariance -> 2 I within 5% (eps = 1)", criterion7);
  if (want(8)) criterion(8, "eps-scaling: covariance -> 0.5 I within 5% (eps = 2)", criterion8);
  if (want(9)) criterion(9, "abelian FP: monotone 1e-6 decay; counterexample preserves the mode", criterion9);
  if (want(10)) criterion(10, "byte-identical reruns, worker-count independent", criterion10);

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geoflow/chart.hpp"
#include "geoflow/group.hpp"
#include "geoflow/hull.hpp"

namespace geoflow {

enum class GeoScheme { LieEuler, RKMK4 };

struct LangevinConfig {
  double nu = 0.0;
  double eps = 0.0;
  Eigen::MatrixXd sigma;  // n x r forcing directions (columns)
  double dt = 1e-3;
  double t_final = 1.0;
  std::uint64_t seed = 0;
  int n_paths = 1;
  double blowup_bound = 1e6;  // |z|_inf guard; exceeded paths are flagged, not dropped
  int snapshots = 1000;       // records per path (plus the initial state)

  void check() const;
};

struct PathRecord {
  std::uint64_t path_id = 0;
  std::vector<double> t;
  std::vector<double> group;  // n_records x group_dim, row-major
  std::vector<double> state;  // n_records x state_dim (z, or chart coordinate s)
  bool blown_up = false;
  std::string abort_reason;

  int records() const { return static_cast<int>(t.size()); }
};

struct TrajectoryEnsemble {
  int group_dim = 0;  // flattened group coordinates per record
  int state_dim = 0;
  double dt = 0;
  std::uint64_t seed = 0;
  std::string group_label = "a";  // column prefix in CSV output
  std::string state_label = "z";
  std::vector<PathRecord> paths;
};

/// One deterministic geodesic step: 4th-order Munthe-Kaas by default,
/// Lie-Euler as the low-order fallback.
void geodesic_step(GroupElement& a, Eigen::VectorXd& z, double dt, const Preset& p,
                   const ArnoldForm<double>& form, GeoScheme scheme = GeoScheme::RKMK4);

/// Euler-Maruyama path of zdot = q(z,z) - nu z + eps sigma wdot, with the
/// group reconstructed by a <- a exp(dt z). Additive noise, so Ito and
/// Stratonovich readings coincide.
PathRecord langevin_path(const LangevinConfig& cfg, const Preset& p, const ArnoldForm<double>& form,
                         const GroupElement& a0, const Eigen::VectorXd& z0, std::uint64_t path_id);

struct ConstrainedConfig {
  double eps = 1.0;
  double dt = 1e-3;
  double t_final = 1.0;
  std::uint64_t seed = 0;
  int n_paths = 1;
  int snapshots = 1000;
  bool randomize_start = false;   // draw s0 uniformly over the period lattice
  double invariance_tol = 1e-8;   // precheck on the chart invariance residual
  double tangency_tol = 1e-8;     // per-step drift pullback residual
};

/// Stratonovich-Heun path of the chart diffusion whose generator is
/// (eps^2/2) Laplace-Beltrami of h plus the pullback of q(z,z).
PathRecord constrained_path(const ZChart& chart, const ConstrainedConfig& cfg, const Preset& p,
                            const ArnoldForm<double>& form, const GroupElement& a0,
                            const Eigen::VectorXd& s0, std::uint64_t path_id);

/// Runs n_paths independent paths; path i derives its stream from (seed, i),
/// so the result is identical for any worker count.
TrajectoryEnsemble ensemble_run(int n_paths, int n_threads,
                                const std::function<PathRecord(std::uint64_t)>& make_path);

void write_trajectory_csv(const TrajectoryEnsemble& e, const std::string& path);
void write_trajectory_binary(const TrajectoryEnsemble& e, const std::string& path);
TrajectoryEnsemble read_trajectory_binary(const std::string& path);

}  // namespace geoflow

#pragma once

#include <Eigen/Dense>

#include <json.hpp>

#include <string>
#include <vector>

#include "geoflow/algebra.hpp"
#include "geoflow/integrate.hpp"

namespace geoflow {

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov machinery

/// One-sample KS distance of values that should be Uniform[0,1].
double ks_distance_uniform(std::vector<double> u);

/// Asymptotic two-sided p-value for KS distance d at sample size n.
double kolmogorov_pvalue(double d, std::size_t n);

/// Regularized lower incomplete gamma P(a, x) (the chi-square / Gamma CDF).
double gamma_p(double a, double x);

// ---------------------------------------------------------------------------
// Gibbs momentum marginal (stationary law of the Langevin model)

struct GibbsReport {
  double beta = 0;
  double ks_distance = 0;
  double p_value = 0;
  double threshold = 0;
  std::size_t n_samples = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Tests H(z) samples against the law induced by density ~ exp(-beta H),
/// beta = 2 nu / eps^2: for quadratic H, 2 beta H is chi-square with dim
/// degrees of freedom regardless of the metric. Throws below min_samples.
GibbsReport gibbs_marginal_test(const std::vector<Eigen::VectorXd>& z_samples, double nu,
                                double eps, const LieAlgebra<double>& alg,
                                double ks_threshold = 0.01, std::size_t min_samples = 1000);

// ---------------------------------------------------------------------------
// Haar uniformity on SO(3)

struct HaarReport {
  Eigen::Matrix3d entry_mean, entry_mean_se;
  Eigen::Matrix3d second_moment, second_moment_se;
  double worst_mean_z = 0;        // max |mean| / SE
  double worst_second_z = 0;      // max |second moment - 1/3| / SE
  double z_threshold = 3.0;
  int n_paths = 0;
  std::size_t n_samples = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Entry means should be 0 and second moments 1/3 under Haar. Standard errors
/// come from the spread of per-path means (paths are independent), which is
/// robust to in-path correlation.
HaarReport haar_uniformity_test(const std::vector<std::vector<Eigen::Matrix3d>>& per_path_samples,
                                double z_threshold = 3.0);

// ---------------------------------------------------------------------------
// Effective diffusivity

struct CovarianceEstimate {
  Eigen::MatrixXd cov;
  Eigen::MatrixXd se;  // jackknife standard errors, entrywise
  int n_paths = 0;
  bool small_ensemble = false;  // fewer than 100 paths
  nlohmann::json to_json() const;
};

/// Covariance of the given vectors with delete-one jackknife errors.
CovarianceEstimate covariance_with_jackknife(const std::vector<Eigen::VectorXd>& v);

/// Rescaled displacements (a(t)-a(0))/sqrt(t) of a translation-group ensemble.
std::vector<Eigen::VectorXd> rescaled_displacements(const TrajectoryEnsemble& e);

/// Covariance of (a(t)-a(0))/sqrt(t); the long-time prediction is
/// (4/eps^2) Sigma for the curve's Parseval matrix Sigma.
CovarianceEstimate effective_covariance(const TrajectoryEnsemble& e);

// ---------------------------------------------------------------------------
// ensemble observable extraction

/// All z records past the burn-in fraction of each path, flattened.
std::vector<Eigen::VectorXd> collect_states(const TrajectoryEnsemble& e, double burn_in_frac);

/// Group matrices (3x3) past burn-in, kept per path.
std::vector<std::vector<Eigen::Matrix3d>> collect_rotations(const TrajectoryEnsemble& e,
                                                            double burn_in_frac);

}  // namespace geoflow

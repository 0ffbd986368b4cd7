#include "geoflow/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geoflow {

double ks_distance_uniform(std::vector<double> u) {
  if (u.empty()) throw std::invalid_argument("ks: no samples");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - u[i];
    const double lo = u[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

double kolmogorov_pvalue(double d, std::size_t n) {
  const double lambda = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n))) * d;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double gamma_p(double a, double x) { return boost::math::gamma_p(a, x); }

nlohmann::json GibbsReport::to_json() const {
  return {{"beta", beta},          {"ks_distance", ks_distance}, {"p_value", p_value},
          {"threshold", threshold}, {"n_samples", n_samples},     {"pass", pass}};
}

GibbsReport gibbs_marginal_test(const std::vector<Eigen::VectorXd>& z_samples, double nu,
                                double eps, const LieAlgebra<double>& alg, double ks_threshold,
                                std::size_t min_samples) {
  if (z_samples.size() < min_samples)
    throw std::invalid_argument("gibbs test: insufficient samples (" +
                                std::to_string(z_samples.size()) + " < " +
                                std::to_string(min_samples) + ")");
  if (!(eps > 0)) throw std::invalid_argument("gibbs test: eps must be positive");
  const double beta = 2.0 * nu / (eps * eps);
  const double half_dim = 0.5 * alg.dim;

  // 2 beta H ~ chi^2_dim, i.e. P(H <= E) = gamma_p(dim/2, beta E)
  std::vector<double> u;
  u.reserve(z_samples.size());
  for (const auto& z : z_samples) {
    Vec<double> zv(z.data(), z.data() + z.size());
    u.push_back(gamma_p(half_dim, beta * energy(alg, zv)));
  }
  GibbsReport rep;
  rep.beta = beta;
  rep.n_samples = z_samples.size();
  rep.ks_distance = ks_distance_uniform(std::move(u));
  rep.p_value = kolmogorov_pvalue(rep.ks_distance, rep.n_samples);
  rep.threshold = ks_threshold;
  rep.pass = rep.ks_distance < ks_threshold;
  return rep;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::json HaarReport::to_json() const {
  return {{"entry_mean", matrix_json(entry_mean)},
          {"entry_mean_se", matrix_json(entry_mean_se)},
          {"second_moment", matrix_json(second_moment)},
          {"second_moment_se", matrix_json(second_moment_se)},
          {"worst_mean_z", worst_mean_z},
          {"worst_second_z", worst_second_z},
          {"z_threshold", z_threshold},
          {"n_paths", n_paths},
          {"n_samples", n_samples},
          {"pass", pass}};
}

HaarReport haar_uniformity_test(const std::vector<std::vector<Eigen::Matrix3d>>& per_path_samples,
                                double z_threshold) {
  int used_paths = 0;
  std::size_t total = 0;
  std::vector<Eigen::Matrix3d> mean1, mean2;  // per-path means of R_ij and R_ij^2
  for (const auto& path : per_path_samples) {
    if (path.empty()) continue;
    Eigen::Matrix3d m1 = Eigen::Matrix3d::Zero(), m2 = Eigen::Matrix3d::Zero();
    for (const auto& r : path) {
      m1 += r;
      m2 += r.cwiseProduct(r);
    }
    m1 /= static_cast<double>(path.size());
    m2 /= static_cast<double>(path.size());
    mean1.push_back(m1);
    mean2.push_back(m2);
    ++used_paths;
    total += path.size();
  }
  if (used_paths < 2) throw std::invalid_argument("haar test: need at least 2 non-empty paths");

  auto across = [&](const std::vector<Eigen::Matrix3d>& per_path, Eigen::Matrix3d& mean,
                    Eigen::Matrix3d& se) {
    mean.setZero();
    for (const auto& m : per_path) mean += m;
    mean /= static_cast<double>(per_path.size());
    Eigen::Matrix3d var = Eigen::Matrix3d::Zero();
    for (const auto& m : per_path) var += (m - mean).cwiseProduct(m - mean);
    var /= static_cast<double>(per_path.size() - 1);
    se = (var / static_cast<double>(per_path.size())).cwiseSqrt();
  };

  HaarReport rep;
  rep.n_paths = used_paths;
  rep.n_samples = total;
  rep.z_threshold = z_threshold;
  across(mean1, rep.entry_mean, rep.entry_mean_se);
  across(mean2, rep.second_moment, rep.second_moment_se);

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      rep.worst_mean_z =
          std::max(rep.worst_mean_z, std::abs(rep.entry_mean(i, j)) / rep.entry_mean_se(i, j));
      rep.worst_second_z = std::max(rep.worst_second_z, std::abs(rep.second_moment(i, j) - 1.0 / 3.0) /
                                                            rep.second_moment_se(i, j));
    }
  rep.pass = rep.worst_mean_z <= z_threshold && rep.worst_second_z <= z_threshold;
  return rep;
}

nlohmann::json CovarianceEstimate::to_json() const {
  return {{"cov", matrix_json(cov)},
          {"se", matrix_json(se)},
          {"n_paths", n_paths},
          {"small_ensemble", small_ensemble}};
}

CovarianceEstimate covariance_with_jackknife(const std::vector<Eigen::VectorXd>& v) {
  const int N = static_cast<int>(v.size());
  if (N < 3) throw std::invalid_argument("covariance: need at least 3 vectors");
  const int n = static_cast<int>(v.front().size());

  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(n, n);
  for (const auto& x : v) {
    s1 += x;
    s2.noalias() += x * x.transpose();
  }
  const Eigen::VectorXd mean = s1 / N;
  CovarianceEstimate est;
  est.n_paths = N;
  est.small_ensemble = N < 100;
  est.cov = (s2 - N * mean * mean.transpose()) / (N - 1.0);

  // delete-one covariances from the same sums
  Eigen::MatrixXd jmean = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::MatrixXd> deleted(N);
  for (int i = 0; i < N; ++i) {
    const Eigen::VectorXd m_i = (s1 - v[i]) / (N - 1.0);
    deleted[i] = (s2 - v[i] * v[i].transpose() - (N - 1.0) * m_i * m_i.transpose()) / (N - 2.0);
    jmean += deleted[i];
  }
  jmean /= N;
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < N; ++i) var += (deleted[i] - jmean).cwiseProduct(deleted[i] - jmean);
  est.se = (var * (N - 1.0) / N).cwiseSqrt();
  return est;
}

std::vector<Eigen::VectorXd> rescaled_displacements(const TrajectoryEnsemble& e) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(e.paths.size());
  for (const auto& p : e.paths) {
    if (p.blown_up || p.records() < 2) continue;
    const int last = p.records() - 1;
    const double span = p.t[last] - p.t[0];
    if (!(span > 0)) continue;
    Eigen::VectorXd d(e.group_dim);
    for (int i = 0; i < e.group_dim; ++i)
      d(i) = (p.group[static_cast<std::size_t>(last) * e.group_dim + i] - p.group[i]) / std::sqrt(span);
    out.push_back(std::move(d));
  }
  return out;
}

CovarianceEstimate effective_covariance(const TrajectoryEnsemble& e) {
  return covariance_with_jackknife(rescaled_displacements(e));
}

std::vector<Eigen::VectorXd> collect_states(const TrajectoryEnsemble& e, double burn_in_frac) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& p : e.paths) {
    if (p.blown_up) continue;
    const int from = static_cast<int>(burn_in_frac * p.records());
    for (int r = from; r < p.records(); ++r) {
      Eigen::VectorXd z(e.state_dim);
      for (int i = 0; i < e.state_dim; ++i) z(i) = p.state[static_cast<std::size_t>(r) * e.state_dim + i];
      out.push_back(std::move(z));
    }
  }
  return out;
}

std::vector<std::vector<Eigen::Matrix3d>> collect_rotations(const TrajectoryEnsemble& e,
                                                            double burn_in_frac) {
  if (e.group_dim != 9) throw std::invalid_argument("collect_rotations: ensemble is not on SO(3)");
  std::vector<std::vector<Eigen::Matrix3d>> out;
  for (const auto& p : e.paths) {
    if (p.blown_up) continue;
    std::vector<Eigen::Matrix3d> rots;
    const int from = static_cast<int>(burn_in_frac * p.records());
    for (int r = from; r < p.records(); ++r) {
      Eigen::Matrix3d m;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = p.group[static_cast<std::size_t>(r) * 9 + i * 3 + j];
      rots.push_back(m);
    }
    out.push_back(std::move(rots));
  }
  return out;
}

}  // namespace geoflow

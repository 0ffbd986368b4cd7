#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geoflow/arnold.hpp"
#include "geoflow/curve.hpp"

namespace geoflow {

/// Parametrized invariant manifold Z inside the algebra. `metric_h` is the
/// rescaled metric whose volume element reproduces the invariant measure
/// density, so Brownian motion of h is the constrained noise model.
struct ZChart {
  std::string name;
  int param_dim = 0;    // m
  int ambient_dim = 0;  // n
  std::vector<double> periods;  // per chart coordinate; 0 = non-periodic

  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> zeta;      // R^m -> R^n
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;  // n x m (optional: FD default)
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> metric_h;  // m x m SPD
  /// Stratonovich drift correction making Heun integrate the Laplace-Beltrami
  /// generator: (1/sqrt h) d_j(sqrt h h^{ij}) - sigma^j_k d_j sigma^i_k.
  /// Null -> computed by central finite differences of metric_h.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> strat_correction;

  /// Set for measure-parametrized curves (h = 1): the integrator may take the
  /// direct ds = eps dW route through curve_data without the callback layer.
  bool unit_metric = false;
  std::optional<CurveSpec> curve_data;

  Eigen::MatrixXd jacobian_or_fd(const Eigen::VectorXd& s) const;
  Eigen::VectorXd correction_or_fd(const Eigen::VectorXd& s) const;
  /// Noise frame: lower-triangular root of h^{-1}.
  Eigen::MatrixXd noise_frame(const Eigen::VectorXd& s) const;
  void wrap(Eigen::VectorXd& s) const;  // fold periodic coordinates into [0, period)
};

/// Circle of radius rho in the plane spanned by u, v (g-orthonormal pair),
/// carrying its arc-length measure. Chart coordinate s in [0, 2 pi).
ZChart circle_chart(const Eigen::VectorXd& center, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& v, double rho);

/// Measure-parametrized Fourier curve (density identically 1 => h = 1).
ZChart curve_chart(const CurveSpec& c);

/// Momentum sphere |z| = rho in so(3) with the round metric; chart (theta, phi).
ZChart sphere_chart(double rho);

/// Deterministic low-discrepancy points of the chart (golden-ratio sequence in
/// 1-D, Halton bases 2,3 otherwise), mapped through zeta.
std::vector<std::vector<double>> chart_low_discrepancy_samples(const ZChart& chart, int count);

/// Max over sampled points of the non-tangential part of the reduced drift
/// q(zeta(s), zeta(s)) relative to its size; small iff Z is invariant.
double chart_invariance_residual(const ZChart& chart, const ArnoldForm<double>& form, int n_pts = 32);

}  // namespace geoflow

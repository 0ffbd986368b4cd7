#pragma once

#include <Eigen/Dense>

#include <vector>

namespace geoflow {

/// Periodic curve in R^n given by a finite Fourier series,
///   gamma(s) = mean + sum_k (cos_coef[k] cos(w_k s) + sin_coef[k] sin(w_k s)),
/// with w_k = 2 pi (k+1) / period. When measure_parametrized is set, the
/// invariant measure of the chart has density 1 in s.
struct CurveSpec {
  int dim = 0;
  double period = 0;
  Eigen::VectorXd mean;
  std::vector<Eigen::VectorXd> cos_coef;  // harmonic k+1
  std::vector<Eigen::VectorXd> sin_coef;
  bool measure_parametrized = true;

  Eigen::VectorXd eval(double s) const;
  void eval_into(double s, Eigen::VectorXd& out) const;  // allocation-free
  Eigen::VectorXd derivative(double s) const;
  void check() const;  // period > 0, coefficient shapes consistent
};

/// gamma(s) = rho (cos s, sin s) with period 2 pi.
CurveSpec circle_curve(double rho = 1.0);

struct CenteredCurve {
  CurveSpec curve;        // zero-mean part
  Eigen::VectorXd drift;  // removed average z0
};

/// Splits off the s-average (the constant drift the paper absorbs by a
/// moving frame).
CenteredCurve center_curve(const CurveSpec& c);

/// Sigma_kl = (1/l) int phi'_k phi'_l ds with gamma = phi''; evaluated by
/// term-wise antidifferentiation and Parseval, exact for a finite series.
/// Throws if the curve has a nonzero mean.
Eigen::MatrixXd sigma_matrix(const CurveSpec& c);

}  // namespace geoflow

#include "geoflow/curve.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geoflow {

void CurveSpec::check() const {
  if (dim < 1) throw std::invalid_argument("curve: dim must be positive");
  if (!(period > 0)) throw std::invalid_argument("curve: period must be positive");
  if (mean.size() != dim) throw std::invalid_argument("curve: mean has wrong dimension");
  if (cos_coef.size() != sin_coef.size())
    throw std::invalid_argument("curve: cos/sin coefficient lists differ in length");
  for (const auto& a : cos_coef)
    if (a.size() != dim) throw std::invalid_argument("curve: cos coefficient has wrong dimension");
  for (const auto& b : sin_coef)
    if (b.size() != dim) throw std::invalid_argument("curve: sin coefficient has wrong dimension");
}

Eigen::VectorXd CurveSpec::eval(double s) const {
  Eigen::VectorXd out(dim);
  eval_into(s, out);
  return out;
}

void CurveSpec::eval_into(double s, Eigen::VectorXd& out) const {
  out = mean;
  const double base = 2.0 * std::numbers::pi / period;
  for (std::size_t k = 0; k < cos_coef.size(); ++k) {
    const double w = base * static_cast<double>(k + 1);
    out += std::cos(w * s) * cos_coef[k] + std::sin(w * s) * sin_coef[k];
  }
}

Eigen::VectorXd CurveSpec::derivative(double s) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  const double base = 2.0 * std::numbers::pi / period;
  for (std::size_t k = 0; k < cos_coef.size(); ++k) {
    const double w = base * static_cast<double>(k + 1);
    out += -w * std::sin(w * s) * cos_coef[k] + w * std::cos(w * s) * sin_coef[k];
  }
  return out;
}

CurveSpec circle_curve(double rho) {
  CurveSpec c;
  c.dim = 2;
  c.period = 2.0 * std::numbers::pi;
  c.mean = Eigen::VectorXd::Zero(2);
  c.cos_coef = {rho * Eigen::Vector2d(1, 0)};
  c.sin_coef = {rho * Eigen::Vector2d(0, 1)};
  return c;
}

CenteredCurve center_curve(const CurveSpec& c) {
  c.check();
  CenteredCurve out{c, c.mean};
  out.curve.mean = Eigen::VectorXd::Zero(c.dim);
  return out;
}

Eigen::MatrixXd sigma_matrix(const CurveSpec& c) {
  c.check();
  if (c.mean.norm() != 0.0)
    throw std::invalid_argument("sigma_matrix: curve must be centered (use center_curve)");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(c.dim, c.dim);
  const double base = 2.0 * std::numbers::pi / c.period;
  // phi' has coefficients (A_k/w_k) sin - (B_k/w_k) cos; Parseval gives the integral
  for (std::size_t k = 0; k < c.cos_coef.size(); ++k) {
    const double w = base * static_cast<double>(k + 1);
    sigma += 0.5 / (w * w) *
             (c.cos_coef[k] * c.cos_coef[k].transpose() + c.sin_coef[k] * c.sin_coef[k].transpose());
  }
  return sigma;
}

}  // namespace geoflow

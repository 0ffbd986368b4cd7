#include "geoflow/chart.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geoflow {

namespace {
constexpr double kFdStep = 1e-5;
}

Eigen::MatrixXd ZChart::jacobian_or_fd(const Eigen::VectorXd& s) const {
  if (jacobian) return jacobian(s);
  Eigen::MatrixXd J(ambient_dim, param_dim);
  Eigen::VectorXd sp = s, sm = s;
  for (int j = 0; j < param_dim; ++j) {
    sp(j) += kFdStep;
    sm(j) -= kFdStep;
    J.col(j) = (zeta(sp) - zeta(sm)) / (2.0 * kFdStep);
    sp(j) = s(j);
    sm(j) = s(j);
  }
  return J;
}

Eigen::MatrixXd ZChart::noise_frame(const Eigen::VectorXd& s) const {
  const Eigen::MatrixXd h = metric_h(s);
  Eigen::LLT<Eigen::MatrixXd> llt(h.inverse());
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("chart '" + name + "': rescaled metric not positive definite");
  return llt.matrixL();
}

Eigen::VectorXd ZChart::correction_or_fd(const Eigen::VectorXd& s) const {
  if (strat_correction) return strat_correction(s);
  const int m = param_dim;
  // divergence term (1/sqrt h) d_j (sqrt h h^{ij})
  Eigen::VectorXd div_term = Eigen::VectorXd::Zero(m);
  const double sqrth0 = std::sqrt(metric_h(s).determinant());
  Eigen::VectorXd sp = s, sm = s;
  for (int j = 0; j < m; ++j) {
    sp(j) += kFdStep;
    sm(j) -= kFdStep;
    const Eigen::MatrixXd hp = metric_h(sp), hm = metric_h(sm);
    const Eigen::VectorXd colp = std::sqrt(hp.determinant()) * hp.inverse().col(j);
    const Eigen::VectorXd colm = std::sqrt(hm.determinant()) * hm.inverse().col(j);
    div_term += (colp - colm) / (2.0 * kFdStep);
    sp(j) = s(j);
    sm(j) = s(j);
  }
  div_term /= sqrth0;
  // Ito->Stratonovich part sigma^j_k d_j sigma^i_k
  Eigen::VectorXd conv = Eigen::VectorXd::Zero(m);
  const Eigen::MatrixXd sig0 = noise_frame(s);
  for (int j = 0; j < m; ++j) {
    sp(j) += kFdStep;
    sm(j) -= kFdStep;
    const Eigen::MatrixXd dsig = (noise_frame(sp) - noise_frame(sm)) / (2.0 * kFdStep);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) conv(i) += sig0(j, k) * dsig(i, k);
    sp(j) = s(j);
    sm(j) = s(j);
  }
  return div_term - conv;
}

void ZChart::wrap(Eigen::VectorXd& s) const {
  for (int j = 0; j < param_dim; ++j) {
    const double p = periods[j];
    if (p > 0) {
      s(j) = std::fmod(s(j), p);
      if (s(j) < 0) s(j) += p;
    }
  }
}

ZChart circle_chart(const Eigen::VectorXd& center, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& v, double rho) {
  if (u.size() != v.size() || center.size() != u.size())
    throw std::invalid_argument("circle_chart: dimension mismatch");
  if (!(rho > 0)) throw std::invalid_argument("circle_chart: radius must be positive");
  ZChart ch;
  ch.name = "circle";
  ch.param_dim = 1;
  ch.ambient_dim = static_cast<int>(u.size());
  ch.periods = {2.0 * std::numbers::pi};
  ch.zeta = [center, u, v, rho](const Eigen::VectorXd& s) -> Eigen::VectorXd {
    return center + rho * (std::cos(s(0)) * u + std::sin(s(0)) * v);
  };
  ch.jacobian = [u, v, rho](const Eigen::VectorXd& s) -> Eigen::MatrixXd {
    Eigen::MatrixXd J(u.size(), 1);
    J.col(0) = rho * (-std::sin(s(0)) * u + std::cos(s(0)) * v);
    return J;
  };
  // arc-length measure: constant speed rho, so h = rho^2 and no correction
  ch.metric_h = [rho](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, rho * rho);
  };
  ch.strat_correction = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); };
  return ch;
}

ZChart curve_chart(const CurveSpec& c) {
  c.check();
  if (!c.measure_parametrized)
    throw std::invalid_argument("curve_chart: curve must be measure-parametrized (density 1)");
  ZChart ch;
  ch.name = "curve";
  ch.param_dim = 1;
  ch.ambient_dim = c.dim;
  ch.periods = {c.period};
  ch.zeta = [c](const Eigen::VectorXd& s) { return c.eval(s(0)); };
  ch.jacobian = [c](const Eigen::VectorXd& s) -> Eigen::MatrixXd {
    Eigen::MatrixXd J(c.dim, 1);
    J.col(0) = c.derivative(s(0));
    return J;
  };
  ch.metric_h = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); };
  ch.strat_correction = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); };
  ch.unit_metric = true;
  ch.curve_data = c;
  return ch;
}

ZChart sphere_chart(double rho) {
  if (!(rho > 0)) throw std::invalid_argument("sphere_chart: radius must be positive");
  ZChart ch;
  ch.name = "sphere";
  ch.param_dim = 2;
  ch.ambient_dim = 3;
  ch.periods = {0.0, 2.0 * std::numbers::pi};  // theta handled by reflection in the integrator
  ch.zeta = [rho](const Eigen::VectorXd& s) -> Eigen::VectorXd {
    const double th = s(0), ph = s(1);
    return rho * Eigen::Vector3d(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                 std::cos(th));
  };
  ch.metric_h = [rho](const Eigen::VectorXd& s) -> Eigen::MatrixXd {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    const double st = std::sin(s(0));
    h(0, 0) = rho * rho;
    h(1, 1) = rho * rho * st * st;
    return h;
  };
  ch.strat_correction = [rho](const Eigen::VectorXd& s) -> Eigen::VectorXd {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
    c(0) = std::cos(s(0)) / (std::sin(s(0)) * rho * rho);
    return c;
  };
  return ch;
}

std::vector<std::vector<double>> chart_low_discrepancy_samples(const ZChart& chart, int count) {
  auto halton = [](int index, int base) {
    double f = 1.0, r = 0.0;
    for (int i = index + 1; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    return r;
  };
  const double golden_frac = 0.6180339887498949;
  std::vector<std::vector<double>> out;
  out.reserve(count);
  Eigen::VectorXd s(chart.param_dim);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < chart.param_dim; ++j) {
      double u;
      if (chart.param_dim == 1) {
        u = std::fmod(0.5 + golden_frac * i, 1.0);
      } else {
        u = halton(i, j == 0 ? 2 : 3);
      }
      const double p = chart.periods[j] > 0 ? chart.periods[j] : std::numbers::pi;
      s(j) = u * p;
    }
    Eigen::VectorXd z = chart.zeta(s);
    out.emplace_back(z.data(), z.data() + z.size());
  }
  return out;
}

double chart_invariance_residual(const ZChart& chart, const ArnoldForm<double>& form, int n_pts) {
  double worst = 0.0;
  // sample parameters, not ambient points, so we can form the Jacobian
  const double golden_frac = 0.6180339887498949;
  Eigen::VectorXd s(chart.param_dim);
  for (int i = 0; i < n_pts; ++i) {
    for (int j = 0; j < chart.param_dim; ++j) {
      const double p = chart.periods[j] > 0 ? chart.periods[j] : std::numbers::pi;
      double u = chart.param_dim == 1 ? std::fmod(0.5 + golden_frac * i, 1.0)
                                      : std::fmod(0.37 + golden_frac * (i * chart.param_dim + j), 1.0);
      s(j) = u * p;
    }
    const Eigen::VectorXd z = chart.zeta(s);
    Vec<double> zv(z.data(), z.data() + z.size());
    Vec<double> rhs = form.q_apply(zv, zv);
    Eigen::Map<Eigen::VectorXd> q(rhs.data(), static_cast<int>(rhs.size()));
    const double qn = q.norm();
    if (qn == 0) continue;
    const Eigen::MatrixXd J = chart.jacobian_or_fd(s);
    const Eigen::VectorXd coeff = J.colPivHouseholderQr().solve(q);
    worst = std::max(worst, (q - J * coeff).norm() / std::max(1.0, qn));
  }
  return worst;
}

}  // namespace geoflow

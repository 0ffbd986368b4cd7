#include "geoflow/group.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace geoflow {

GroupElement GroupElement::identity(const Preset& p) {
  GroupElement e;
  e.kind = p.group_kind;
  if (p.group_kind == GroupKind::Translation) {
    e.t = Eigen::VectorXd::Zero(p.num.dim);
  } else {
    if (p.rep.empty()) throw std::invalid_argument("preset has no matrix representation: " + p.name);
    e.m = Eigen::MatrixXd::Identity(p.rep[0].rows(), p.rep[0].cols());
  }
  return e;
}

Eigen::MatrixXd rep_of(const Eigen::VectorXd& x, const Preset& p) {
  if (p.rep.empty()) throw std::invalid_argument("preset has no matrix representation: " + p.name);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(p.rep[0].rows(), p.rep[0].cols());
  for (int i = 0; i < x.size(); ++i) X += x(i) * p.rep[i];
  return X;
}

Eigen::VectorXd algebra_coords(const Eigen::MatrixXd& X, const Preset& p) {
  if (p.rep.empty()) throw std::invalid_argument("preset has no matrix representation: " + p.name);
  const int n = static_cast<int>(p.rep.size());
  Eigen::MatrixXd gram(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    rhs(i) = (p.rep[i].array() * X.array()).sum();
    for (int j = 0; j < n; ++j) gram(i, j) = (p.rep[i].array() * p.rep[j].array()).sum();
  }
  return gram.ldlt().solve(rhs);
}

namespace {

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  Eigen::Matrix3d K;
  K << 0, -w(2), w(1), w(2), 0, -w(0), -w(1), w(0), 0;
  if (theta < 1e-8) {
    // series keeps full accuracy through the theta -> 0 limit
    return Eigen::Matrix3d::Identity() + K + 0.5 * K * K;
  }
  const double s = std::sin(theta) / theta;
  const double c = (1.0 - std::cos(theta)) / (theta * theta);
  return Eigen::Matrix3d::Identity() + s * K + c * K * K;
}

}  // namespace

GroupElement group_exp(const Eigen::VectorXd& x, const Preset& p) {
  GroupElement out;
  out.kind = p.group_kind;
  switch (p.exp_form) {
    case ExpForm::Translation:
      out.t = x;
      return out;
    case ExpForm::Rodrigues:
      out.m = rodrigues(Eigen::Vector3d(x(0), x(1), x(2)));
      return out;
    case ExpForm::NilpotentDeg2: {
      Eigen::MatrixXd X = rep_of(x, p);
      out.m = Eigen::MatrixXd::Identity(X.rows(), X.cols()) + X + 0.5 * X * X;
      return out;
    }
    case ExpForm::Pade: {
      out.m = rep_of(x, p).exp();
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

void compose_inplace(GroupElement& a, const GroupElement& b) {
  if (a.kind != b.kind) throw std::invalid_argument("compose: mixed group kinds");
  if (a.kind == GroupKind::Translation)
    a.t += b.t;
  else
    a.m = a.m * b.m;
}

void advance_group(GroupElement& a, const Eigen::VectorXd& xi, const Preset& p) {
  if (a.kind == GroupKind::Translation) {
    a.t += xi;
    return;
  }
  if (p.exp_form == ExpForm::Rodrigues && a.m.rows() == 3) {
    // stack-only path for the long SO(3) runs
    Eigen::Map<Eigen::Matrix3d> am(a.m.data());
    const Eigen::Matrix3d r = rodrigues(Eigen::Vector3d(xi(0), xi(1), xi(2)));
    const Eigen::Matrix3d prod = am * r;
    am = prod;
    return;
  }
  GroupElement step = group_exp(xi, p);
  a.m = a.m * step.m;
}

Eigen::VectorXd momentum(const GroupElement& a, const Eigen::VectorXd& z, const Preset& p) {
  const int n = p.num.dim;
  Vec<double> zv(z.data(), z.data() + z.size());
  Vec<double> yv = lower_index(p.num, zv);
  Eigen::Map<const Eigen::VectorXd> y(yv.data(), n);

  if (p.group_kind == GroupKind::Translation) return y;  // Ad is the identity

  if (p.rep.empty()) throw std::invalid_argument("momentum: preset has no matrix representation");
  Eigen::MatrixXd ainv = a.m.inverse();
  Eigen::VectorXd M(n);
  for (int k = 0; k < n; ++k) {
    // coordinates of Ad a^-1 e_k = a^-1 e_k a
    Eigen::VectorXd coords = algebra_coords(ainv * p.rep[k] * a.m, p);
    M(k) = y.dot(coords);
  }
  return M;
}

double orthogonality_residual(const GroupElement& a) {
  if (a.kind == GroupKind::Translation) return 0.0;
  const Eigen::MatrixXd r =
      a.m.transpose() * a.m - Eigen::MatrixXd::Identity(a.m.rows(), a.m.cols());
  return r.cwiseAbs().maxCoeff();
}

void reorthonormalize(GroupElement& a) {
  if (a.kind == GroupKind::Translation) return;
  if (a.m.rows() == 3) {
    Eigen::Map<Eigen::Matrix3d> am(a.m.data());
    Eigen::Matrix3d g = am.transpose() * am - Eigen::Matrix3d::Identity();
    double res = g.cwiseAbs().maxCoeff();
    if (res < 0.3) {
      for (int it = 0; it < 3 && res > 1e-15; ++it) {
        const Eigen::Matrix3d next = 0.5 * (am + am.inverse().transpose());
        am = next;
        g = am.transpose() * am - Eigen::Matrix3d::Identity();
        res = g.cwiseAbs().maxCoeff();
      }
      return;
    }
  }
  const double res = orthogonality_residual(a);
  if (res < 0.3) {
    // Newton polar iteration; quadratic convergence near the group
    for (int it = 0; it < 3; ++it) {
      a.m = 0.5 * (a.m + a.m.inverse().transpose());
      if (orthogonality_residual(a) < 1e-15) break;
    }
    return;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  a.m = svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace geoflow

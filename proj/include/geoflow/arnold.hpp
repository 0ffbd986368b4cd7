#pragma once

#include <stdexcept>
#include <vector>

#include "geoflow/algebra.hpp"

namespace geoflow {

/// Bilinear form of the reduced geodesic equation zdot = q(z,z).
/// qtilde is defined by <[x,y],z>_g = <qtilde(z,x),y>_g; qsym is its
/// symmetrization, the only part entering the dynamics.
template <class S>
struct ArnoldForm {
  int dim = 0;
  std::vector<S> qtilde;  // [k][i][j]: qtilde(z,x)^k = qtilde^k_ij z^i x^j
  std::vector<S> qsym;    // symmetric in (i,j)

  const S& qt_at(int k, int i, int j) const { return qtilde[(static_cast<std::size_t>(k) * dim + i) * dim + j]; }
  S& qt_at(int k, int i, int j) { return qtilde[(static_cast<std::size_t>(k) * dim + i) * dim + j]; }
  const S& qs_at(int k, int i, int j) const { return qsym[(static_cast<std::size_t>(k) * dim + i) * dim + j]; }
  S& qs_at(int k, int i, int j) { return qsym[(static_cast<std::size_t>(k) * dim + i) * dim + j]; }

  Vec<S> qtilde_apply(const Vec<S>& z, const Vec<S>& x) const {
    Vec<S> out(dim, S(0));
    for (int k = 0; k < dim; ++k) {
      S acc(0);
      for (int i = 0; i < dim; ++i) {
        if (scal::is_zero(z[i])) continue;
        for (int j = 0; j < dim; ++j) acc += qt_at(k, i, j) * z[i] * x[j];
      }
      out[k] = acc;
    }
    return out;
  }

  /// q(u,v), symmetric in its arguments.
  Vec<S> q_apply(const Vec<S>& u, const Vec<S>& v) const {
    Vec<S> out(dim, S(0));
    for (int k = 0; k < dim; ++k) {
      S acc(0);
      for (int i = 0; i < dim; ++i) {
        if (scal::is_zero(u[i])) continue;
        for (int j = 0; j < dim; ++j) acc += qs_at(k, i, j) * u[i] * v[j];
      }
      out[k] = acc;
    }
    return out;
  }
};

/// Solves the defining relations for qtilde by lowering/raising with g.
/// Throws if the metric is singular.
template <class S>
ArnoldForm<S> arnold_form(const LieAlgebra<S>& alg);

template <>
inline ArnoldForm<Rat> arnold_form(const LieAlgebra<Rat>& alg) {
  const int n = alg.dim;
  Mat<Rat> G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = alg.g_at(i, j);
  Mat<Rat> Ginv = invert_exact(G);

  ArnoldForm<Rat> f;
  f.dim = n;
  f.qtilde.assign(static_cast<std::size_t>(n) * n * n, Rat(0));
  f.qsym.assign(static_cast<std::size_t>(n) * n * n, Rat(0));
  // g_jl qtilde^l_mi = c^k_ij g_km  for all j, solved per (m,i)
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i) {
      Vec<Rat> w(n, Rat(0));
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) w[j] += alg.c_at(k, i, j) * alg.g_at(k, m);
      for (int l = 0; l < n; ++l) {
        Rat acc(0);
        for (int j = 0; j < n; ++j) acc += Ginv(l, j) * w[j];
        f.qt_at(l, m, i) = acc;
      }
    }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        f.qs_at(k, i, j) = (f.qt_at(k, i, j) + f.qt_at(k, j, i)) / Rat(2);
  return f;
}

template <>
inline ArnoldForm<double> arnold_form(const LieAlgebra<double>& alg) {
  const int n = alg.dim;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = alg.g_at(i, j);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
  if (!lu.isInvertible()) throw std::invalid_argument("arnold_form: singular metric");

  ArnoldForm<double> f;
  f.dim = n;
  f.qtilde.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  f.qsym.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) w(j) += alg.c_at(k, i, j) * alg.g_at(k, m);
      Eigen::VectorXd col = lu.solve(w);
      for (int l = 0; l < n; ++l) f.qt_at(l, m, i) = col(l);
    }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        f.qs_at(k, i, j) = 0.5 * (f.qt_at(k, i, j) + f.qt_at(k, j, i));
  return f;
}

/// Right-hand side of the reduced geodesic equation.
template <class S>
Vec<S> euler_arnold_rhs(const Vec<S>& z, const ArnoldForm<S>& form) {
  return form.q_apply(z, z);
}

/// Max residual of <[e_i,e_j],e_m>_g = <qtilde(e_m,e_i),e_j>_g over basis triples.
template <class S>
S arnold_defining_residual(const LieAlgebra<S>& alg, const ArnoldForm<S>& form) {
  const int n = alg.dim;
  S worst(0);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        S lhs(0), rhs(0);
        for (int k = 0; k < n; ++k) {
          lhs += alg.c_at(k, i, j) * alg.g_at(k, m);
          rhs += form.qt_at(k, m, i) * alg.g_at(k, j);
        }
        S r = scal::abs_val(S(lhs - rhs));
        if (r > worst) worst = r;
      }
  return worst;
}

}  // namespace geoflow

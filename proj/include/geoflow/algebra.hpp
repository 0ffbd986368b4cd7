#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoflow/linalg.hpp"
#include "geoflow/rational.hpp"

namespace geoflow {

/// A finite-dimensional Lie algebra given by structure constants c^k_ij
/// ([e_i,e_j] = c^k_ij e_k) together with an inner product g_ij on it.
/// S is double or Rat; all operations are exact when S = Rat.
template <class S>
struct LieAlgebra {
  int dim = 0;
  std::vector<S> c;  // flattened [k][i][j]
  std::vector<S> g;  // flattened [i][j]

  LieAlgebra() = default;
  explicit LieAlgebra(int n)
      : dim(n),
        c(static_cast<std::size_t>(n) * n * n, S(0)),
        g(static_cast<std::size_t>(n) * n, S(0)) {
    for (int i = 0; i < n; ++i) g_at(i, i) = S(1);
  }

  S& c_at(int k, int i, int j) { return c[(static_cast<std::size_t>(k) * dim + i) * dim + j]; }
  const S& c_at(int k, int i, int j) const { return c[(static_cast<std::size_t>(k) * dim + i) * dim + j]; }
  S& g_at(int i, int j) { return g[static_cast<std::size_t>(i) * dim + j]; }
  const S& g_at(int i, int j) const { return g[static_cast<std::size_t>(i) * dim + j]; }

  /// Sets [e_i,e_j] += v e_k and the antisymmetric counterpart.
  void add_bracket(int i, int j, int k, const S& v) {
    c_at(k, i, j) += v;
    c_at(k, j, i) -= v;
  }

  S inner(const Vec<S>& x, const Vec<S>& y) const {
    S acc(0);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) acc += g_at(i, j) * x[i] * y[j];
    return acc;
  }
};

template <class S>
Vec<S> bracket(const LieAlgebra<S>& alg, const Vec<S>& x, const Vec<S>& y) {
  const int n = alg.dim;
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("bracket: dimension mismatch");
  Vec<S> out(n, S(0));
  for (int k = 0; k < n; ++k) {
    S acc(0);
    for (int i = 0; i < n; ++i) {
      if (scal::is_zero(x[i])) continue;
      for (int j = 0; j < n; ++j) acc += alg.c_at(k, i, j) * x[i] * y[j];
    }
    out[k] = acc;
  }
  return out;
}

/// Matrix of ad_x : y -> [x,y] in the e-basis.
template <class S>
Mat<S> ad_matrix(const LieAlgebra<S>& alg, const Vec<S>& x) {
  const int n = alg.dim;
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("ad_matrix: dimension mismatch");
  Mat<S> A(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      S acc(0);
      for (int i = 0; i < n; ++i) acc += alg.c_at(k, i, j) * x[i];
      A(k, j) = acc;
    }
  return A;
}

template <class S>
S antisymmetry_residual(const LieAlgebra<S>& alg) {
  const int n = alg.dim;
  S worst(0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        S r = scal::abs_val(S(alg.c_at(k, i, j) + alg.c_at(k, j, i)));
        if (r > worst) worst = r;
      }
  return worst;
}

/// Max-norm of the cyclic Jacobi sum over all basis triples; zero iff Jacobi holds.
template <class S>
S jacobi_residual(const LieAlgebra<S>& alg) {
  const int n = alg.dim;
  S worst(0);
  Vec<S> ei(n, S(0)), ej(n, S(0)), ek(n, S(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        ei.assign(n, S(0)); ej.assign(n, S(0)); ek.assign(n, S(0));
        ei[i] = S(1); ej[j] = S(1); ek[k] = S(1);
        Vec<S> s1 = bracket(alg, bracket(alg, ei, ej), ek);
        Vec<S> s2 = bracket(alg, bracket(alg, ej, ek), ei);
        Vec<S> s3 = bracket(alg, bracket(alg, ek, ei), ej);
        for (int m = 0; m < n; ++m) {
          S r = scal::abs_val(S(s1[m] + s2[m] + s3[m]));
          if (r > worst) worst = r;
        }
      }
  return worst;
}

/// True iff every ad map is trace-free (left and right Haar measures coincide).
template <class S>
bool unimodularity_check(const LieAlgebra<S>& alg) {
  const int n = alg.dim;
  for (int j = 0; j < n; ++j) {
    S tr(0);
    for (int k = 0; k < n; ++k) tr += alg.c_at(k, j, k);  // trace of ad e_j
    if (!scal::is_zero(tr)) return false;
  }
  return true;
}

/// Kinetic energy 1/2 <z,z>_g.
template <class S>
S energy(const LieAlgebra<S>& alg, const Vec<S>& z) {
  return alg.inner(z, z) / S(2);
}

/// Lowered-index coordinates y_k = g_kj z^j.
template <class S>
Vec<S> lower_index(const LieAlgebra<S>& alg, const Vec<S>& z) {
  const int n = alg.dim;
  Vec<S> y(n, S(0));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) y[k] += alg.g_at(k, j) * z[j];
  return y;
}

inline bool metric_positive_definite(const LieAlgebra<Rat>& alg) {
  Mat<Rat> G(alg.dim, alg.dim);
  for (int i = 0; i < alg.dim; ++i)
    for (int j = 0; j < alg.dim; ++j) G(i, j) = alg.g_at(i, j);
  return leading_minors_positive(G);
}

inline bool metric_positive_definite(const LieAlgebra<double>& alg) {
  Eigen::MatrixXd G(alg.dim, alg.dim);
  for (int i = 0; i < alg.dim; ++i)
    for (int j = 0; j < alg.dim; ++j) G(i, j) = alg.g_at(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  return es.eigenvalues().minCoeff() > 0.0;
}

/// Throws with a diagnostic if the data does not define a metric Lie algebra.
template <class S>
void validate(const LieAlgebra<S>& alg, double tol = 1e-14) {
  if (alg.dim <= 0) throw std::invalid_argument("algebra: dim must be positive");
  if (scal::to_double(antisymmetry_residual(alg)) > tol)
    throw std::invalid_argument("algebra: structure constants not antisymmetric");
  if (scal::to_double(jacobi_residual(alg)) > tol)
    throw std::invalid_argument("algebra: Jacobi identity fails");
  for (int i = 0; i < alg.dim; ++i)
    for (int j = 0; j < alg.dim; ++j)
      if (scal::to_double(scal::abs_val(S(alg.g_at(i, j) - alg.g_at(j, i)))) > tol)
        throw std::invalid_argument("algebra: metric not symmetric");
  if (!metric_positive_definite(alg))
    throw std::invalid_argument("algebra: metric not positive definite");
}

inline LieAlgebra<double> to_double_algebra(const LieAlgebra<Rat>& a) {
  LieAlgebra<double> d(a.dim);
  for (std::size_t i = 0; i < a.c.size(); ++i) d.c[i] = a.c[i].get_d();
  for (std::size_t i = 0; i < a.g.size(); ++i) d.g[i] = a.g[i].get_d();
  return d;
}

inline Vec<double> to_double_vec(const Vec<Rat>& v) {
  Vec<double> d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d[i] = v[i].get_d();
  return d;
}

}  // namespace geoflow

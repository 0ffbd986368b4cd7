#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "geoflow/rational.hpp"

namespace geoflow {

template <class S>
using Vec = std::vector<S>;

/// Minimal dense row-major matrix; only what the closure algorithms need.
template <class S>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, S(0)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  S& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const S& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<S> a_;
};

struct RankResult {
  int rank = 0;
  bool borderline = false;      // a singular value fell within 10x of the cutoff
  std::vector<int> pivot_rows;  // indices of input rows forming a basis of the row space
};

/// Relative singular-value cutoff for float-mode rank decisions.
inline constexpr double kRankRelTol = 1e-10;

namespace detail {

inline Eigen::MatrixXd to_eigen(const std::vector<Vec<double>>& rows, int cols) {
  Eigen::MatrixXd m(static_cast<int>(rows.size()), cols);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace detail

/// Exact rank with pivot-row tracking (Gaussian elimination over Q).
inline RankResult row_rank(const std::vector<Vec<Rat>>& rows, int cols) {
  RankResult res;
  if (rows.empty() || cols == 0) return res;
  std::vector<Vec<Rat>> work = rows;
  std::vector<int> label(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) label[i] = static_cast<int>(i);

  int r = 0;
  for (int c = 0; c < cols && r < static_cast<int>(work.size()); ++c) {
    int piv = -1;
    for (int i = r; i < static_cast<int>(work.size()); ++i)
      if (!scal::is_zero(work[i][c])) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(work[piv], work[r]);
    std::swap(label[piv], label[r]);
    for (int i = r + 1; i < static_cast<int>(work.size()); ++i) {
      if (scal::is_zero(work[i][c])) continue;
      Rat f = work[i][c] / work[r][c];
      for (int j = c; j < cols; ++j) work[i][j] -= f * work[r][j];
    }
    res.pivot_rows.push_back(label[r]);
    ++r;
  }
  res.rank = r;
  return res;
}

/// Float rank: SVD decides the rank, column-pivoted QR picks representative rows.
inline RankResult row_rank(const std::vector<Vec<double>>& rows, int cols) {
  RankResult res;
  if (rows.empty() || cols == 0) return res;
  Eigen::MatrixXd m = detail::to_eigen(rows, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  if (smax == 0.0) return res;
  const double tol = kRankRelTol * smax;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++res.rank;
    if (sv(i) > tol * 0.1 && sv(i) < tol * 10.0) res.borderline = true;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m.transpose());
  const auto& perm = qr.colsPermutation().indices();
  for (int i = 0; i < res.rank; ++i) res.pivot_rows.push_back(perm(i));
  return res;
}

/// Solves the square system A x = b exactly. Throws on singular A.
inline Vec<Rat> solve_exact(const Mat<Rat>& A, const Vec<Rat>& b) {
  const int n = A.rows();
  if (A.cols() != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_exact: dimension mismatch");
  Mat<Rat> w = A;
  Vec<Rat> x = b;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (!scal::is_zero(w(i, c))) { piv = i; break; }
    if (piv < 0) throw std::invalid_argument("solve_exact: singular matrix");
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(w(piv, j), w(c, j));
      std::swap(x[piv], x[c]);
    }
    for (int i = 0; i < n; ++i) {
      if (i == c || scal::is_zero(w(i, c))) continue;
      Rat f = w(i, c) / w(c, c);
      for (int j = c; j < n; ++j) w(i, j) -= f * w(c, j);
      x[i] -= f * x[c];
    }
  }
  for (int i = 0; i < n; ++i) x[i] /= w(i, i);
  return x;
}

inline Mat<Rat> invert_exact(const Mat<Rat>& A) {
  const int n = A.rows();
  Mat<Rat> inv(n, n);
  Vec<Rat> e(n, Rat(0));
  for (int c = 0; c < n; ++c) {
    e[c] = 1;
    Vec<Rat> col = solve_exact(A, e);
    for (int i = 0; i < n; ++i) inv(i, c) = col[i];
    e[c] = 0;
  }
  return inv;
}

/// Sylvester criterion: all leading principal minors positive (exact SPD test).
inline bool leading_minors_positive(const Mat<Rat>& A) {
  const int n = A.rows();
  Mat<Rat> w = A;
  // fraction-free elimination would also work; plain division is fine at these sizes
  for (int c = 0; c < n; ++c) {
    if (sgn(w(c, c)) <= 0) return false;
    for (int i = c + 1; i < n; ++i) {
      Rat f = w(i, c) / w(c, c);
      for (int j = c; j < n; ++j) w(i, j) -= f * w(c, j);
    }
  }
  return true;
}

}  // namespace geoflow

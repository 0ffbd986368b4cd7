#pragma once

#include <Eigen/Dense>

#include "geoflow/presets.hpp"

namespace geoflow {

/// Group element: a d x d matrix for matrix-group presets, a translation
/// vector for abelian ones.
struct GroupElement {
  GroupKind kind = GroupKind::Matrix;
  Eigen::MatrixXd m;
  Eigen::VectorXd t;

  static GroupElement identity(const Preset& p);
};

/// Image of algebra coordinates in the shipped representation.
Eigen::MatrixXd rep_of(const Eigen::VectorXd& x, const Preset& p);

/// Coordinates of a representation matrix in the basis rep_1..rep_n.
Eigen::VectorXd algebra_coords(const Eigen::MatrixXd& X, const Preset& p);

/// Group exponential of the algebra element with coordinates x.
GroupElement group_exp(const Eigen::VectorXd& x, const Preset& p);

/// a <- a * b
void compose_inplace(GroupElement& a, const GroupElement& b);

/// a <- a * exp(xi); allocation-free for translations and 3x3 rotations.
void advance_group(GroupElement& a, const Eigen::VectorXd& xi, const Preset& p);

/// Noether momentum M(a,z) = (Ad a^-1)^* (g z), in dual-basis coordinates.
/// Throws for presets without a representation.
Eigen::VectorXd momentum(const GroupElement& a, const Eigen::VectorXd& z, const Preset& p);

/// ||a^T a - I||_inf for matrix elements; 0 for translations.
double orthogonality_residual(const GroupElement& a);

/// Projects a near-orthogonal matrix back to the group (polar decomposition
/// by Newton iteration; exact SVD fallback far from the group).
void reorthonormalize(GroupElement& a);

}  // namespace geoflow

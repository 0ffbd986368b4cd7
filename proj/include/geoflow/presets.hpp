#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "geoflow/algebra.hpp"

namespace geoflow {

enum class GroupKind { Matrix, Translation };
enum class ExpForm { Pade, Rodrigues, NilpotentDeg2, Translation };

/// A named algebra with exact data, a float shadow, and (where available)
/// a faithful matrix representation so group-level simulation works.
struct Preset {
  std::string name;
  LieAlgebra<Rat> exact;
  LieAlgebra<double> num;
  GroupKind group_kind = GroupKind::Matrix;
  ExpForm exp_form = ExpForm::Pade;
  std::vector<Eigen::MatrixXd> rep;  // basis images; empty if no representation shipped
  bool orthogonal_group = false;     // re-project to the orthogonal group after steps
  bool has_representation() const { return group_kind == GroupKind::Translation || !rep.empty(); }
};

/// abelian(n), heisenberg3, so3_euclid, so3_rigid(I1,I2,I3), affine2, so3_plus_so3.
Preset make_preset(const std::string& name, const std::vector<Rat>& params = {});

/// Accepts "so3_rigid(1,2,3)", "abelian(4)", plain names, and rational params like "1/2".
Preset parse_preset(const std::string& spec);

std::vector<std::string> preset_names();

}  // namespace geoflow

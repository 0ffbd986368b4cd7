#include "geoflow/presets.hpp"

#include <sstream>
#include <stdexcept>

namespace geoflow {

namespace {

Eigen::MatrixXd so3_generator(int i) {
  // (L_i)_{jk} = -eps_{ijk}; L_1 = d/dtheta about x, etc.
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(3, 3);
  const int a = (i + 1) % 3, b = (i + 2) % 3;
  L(b, a) = 1.0;
  L(a, b) = -1.0;
  return L;
}

void set_so3_brackets(LieAlgebra<Rat>& alg, int off = 0) {
  alg.add_bracket(off + 0, off + 1, off + 2, Rat(1));
  alg.add_bracket(off + 1, off + 2, off + 0, Rat(1));
  alg.add_bracket(off + 2, off + 0, off + 1, Rat(1));
}

Preset finish(Preset p) {
  validate(p.exact);
  p.num = to_double_algebra(p.exact);
  return p;
}

}  // namespace

Preset make_preset(const std::string& name, const std::vector<Rat>& params) {
  Preset p;
  p.name = name;

  if (name == "abelian") {
    if (params.size() != 1) throw std::invalid_argument("abelian needs one parameter: dimension");
    const int n = static_cast<int>(params[0].get_d());
    if (n < 1 || Rat(n) != params[0]) throw std::invalid_argument("abelian: dimension must be a positive integer");
    p.exact = LieAlgebra<Rat>(n);
    p.group_kind = GroupKind::Translation;
    p.exp_form = ExpForm::Translation;
    p.name = "abelian(" + std::to_string(n) + ")";
    return finish(std::move(p));
  }

  if (name == "heisenberg3") {
    p.exact = LieAlgebra<Rat>(3);
    p.exact.add_bracket(0, 1, 2, Rat(1));  // [e1,e2] = e3
    p.exp_form = ExpForm::NilpotentDeg2;
    Eigen::MatrixXd E12 = Eigen::MatrixXd::Zero(3, 3), E23 = E12, E13 = E12;
    E12(0, 1) = 1.0;
    E23(1, 2) = 1.0;
    E13(0, 2) = 1.0;
    p.rep = {E12, E23, E13};
    return finish(std::move(p));
  }

  if (name == "so3_euclid" || name == "so3_rigid") {
    p.exact = LieAlgebra<Rat>(3);
    set_so3_brackets(p.exact);
    if (name == "so3_rigid") {
      if (params.size() != 3) throw std::invalid_argument("so3_rigid needs parameters I1,I2,I3");
      for (int i = 0; i < 3; ++i) {
        if (sgn(params[i]) <= 0) throw std::invalid_argument("so3_rigid: moments must be positive");
        p.exact.g_at(i, i) = params[i];
      }
      std::ostringstream os;
      os << "so3_rigid(" << params[0].get_str() << "," << params[1].get_str() << ","
         << params[2].get_str() << ")";
      p.name = os.str();
    }
    p.exp_form = ExpForm::Rodrigues;
    p.orthogonal_group = true;
    p.rep = {so3_generator(0), so3_generator(1), so3_generator(2)};
    return finish(std::move(p));
  }

  if (name == "affine2") {
    p.exact = LieAlgebra<Rat>(2);
    p.exact.add_bracket(0, 1, 1, Rat(1));  // [e1,e2] = e2; not unimodular
    Eigen::MatrixXd E11 = Eigen::MatrixXd::Zero(2, 2), E12 = E11;
    E11(0, 0) = 1.0;
    E12(0, 1) = 1.0;
    p.rep = {E11, E12};
    return finish(std::move(p));
  }

  if (name == "so3_plus_so3") {
    p.exact = LieAlgebra<Rat>(6);
    set_so3_brackets(p.exact, 0);
    set_so3_brackets(p.exact, 3);
    p.orthogonal_group = true;
    p.rep.resize(6, Eigen::MatrixXd::Zero(6, 6));
    for (int i = 0; i < 3; ++i) {
      p.rep[i].block<3, 3>(0, 0) = so3_generator(i);
      p.rep[3 + i].block<3, 3>(3, 3) = so3_generator(i);
    }
    return finish(std::move(p));
  }

  throw std::invalid_argument("unknown preset: " + name);
}

Preset parse_preset(const std::string& spec) {
  const auto open = spec.find('(');
  if (open == std::string::npos) return make_preset(spec);
  if (spec.back() != ')') throw std::invalid_argument("malformed preset spec: " + spec);
  const std::string base = spec.substr(0, open);
  std::string args = spec.substr(open + 1, spec.size() - open - 2);
  std::vector<Rat> params;
  std::string tok;
  std::istringstream is(args);
  while (std::getline(is, tok, ',')) {
    if (!tok.empty()) params.push_back(parse_rational(tok));
  }
  return make_preset(base, params);
}

std::vector<std::string> preset_names() {
  return {"abelian", "heisenberg3", "so3_euclid", "so3_rigid", "affine2", "so3_plus_so3"};
}

}  // namespace geoflow

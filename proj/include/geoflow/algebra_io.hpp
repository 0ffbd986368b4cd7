#pragma once

#include <string>

#include "geoflow/algebra.hpp"

namespace geoflow {

/// An algebra loaded from file. Values parse into exact rationals (decimal
/// literals are exact), so both float and exact modes are always available.
struct AlgebraFile {
  std::string name;
  LieAlgebra<Rat> exact;
  LieAlgebra<double> num;
};

/// File schema (JSON): dim; metric as a row-major list; brackets as sparse
/// 1-based triples [i, j, k, value] meaning [e_i,e_j] = value * e_k (+ ...).
/// Numeric entries may be numbers or strings like "1/3".
AlgebraFile load_algebra(const std::string& path);

void save_algebra(const AlgebraFile& alg, const std::string& path);

}  // namespace geoflow

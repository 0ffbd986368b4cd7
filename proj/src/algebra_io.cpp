#include "geoflow/algebra_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace geoflow {

namespace {

Rat json_rational(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(v.get<long>());
  if (v.is_number_float()) return rational_from_double(v.get<double>());
  throw std::invalid_argument("algebra file: " + where + " must be a number or rational string");
}

}  // namespace

AlgebraFile load_algebra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open algebra file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("algebra file " + path + ": " + e.what());
  }

  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw std::invalid_argument("algebra file: missing integer field 'dim'");
  const int n = j["dim"].get<int>();
  if (n < 1) throw std::invalid_argument("algebra file: dim must be positive");

  AlgebraFile out;
  out.name = j.value("name", path);
  out.exact = LieAlgebra<Rat>(n);

  if (j.contains("metric")) {
    const auto& m = j["metric"];
    if (!m.is_array() || static_cast<int>(m.size()) != n * n)
      throw std::invalid_argument("algebra file: metric must be a row-major list of dim*dim entries");
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        out.exact.g_at(i, k) = json_rational(m[i * n + k], "metric entry");
  }

  if (!j.contains("brackets") || !j["brackets"].is_array())
    throw std::invalid_argument("algebra file: missing list field 'brackets'");
  for (const auto& t : j["brackets"]) {
    if (!t.is_array() || t.size() != 4)
      throw std::invalid_argument("algebra file: each bracket entry is [i, j, k, value]");
    const int i = t[0].get<int>(), jj = t[1].get<int>(), k = t[2].get<int>();
    if (i < 1 || i > n || jj < 1 || jj > n || k < 1 || k > n)
      throw std::invalid_argument("algebra file: bracket indices are 1-based in [1, dim]");
    out.exact.add_bracket(i - 1, jj - 1, k - 1, json_rational(t[3], "bracket value"));
  }

  try {
    validate(out.exact);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("algebra file " + path + ": " + e.what());
  }
  out.num = to_double_algebra(out.exact);
  return out;
}

void save_algebra(const AlgebraFile& alg, const std::string& path) {
  const int n = alg.exact.dim;
  nlohmann::json j;
  j["name"] = alg.name;
  j["dim"] = n;
  nlohmann::json metric = nlohmann::json::array();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) metric.push_back(alg.exact.g_at(i, k).get_str());
  j["metric"] = metric;
  nlohmann::json brackets = nlohmann::json::array();
  for (int i = 0; i < n; ++i)
    for (int jj = i + 1; jj < n; ++jj)
      for (int k = 0; k < n; ++k)
        if (!scal::is_zero(alg.exact.c_at(k, i, jj)))
          brackets.push_back({i + 1, jj + 1, k + 1, alg.exact.c_at(k, i, jj).get_str()});
  j["brackets"] = brackets;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write algebra file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace geoflow

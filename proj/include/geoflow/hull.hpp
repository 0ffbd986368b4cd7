#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "geoflow/arnold.hpp"

namespace geoflow {

template <class S>
struct SubspaceBasis {
  std::vector<Vec<S>> vectors;
  int rank = 0;
};

/// Forcing directions: sigma is n x r, stored by columns.
template <class S>
struct Forcing {
  std::vector<Vec<S>> columns;

  int rank_bound() const { return static_cast<int>(columns.size()); }

  /// h = sigma sigma^T; its range equals the span of the columns.
  Mat<S> diffusion_matrix(int n) const {
    Mat<S> h(n, n);
    for (const auto& col : columns)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) += col[i] * col[j];
    return h;
  }

  void validate(int n) const {
    if (columns.empty()) throw std::invalid_argument("forcing: need at least one direction");
    for (const auto& col : columns) {
      if (static_cast<int>(col.size()) != n) throw std::invalid_argument("forcing: dimension mismatch");
      bool nonzero = false;
      for (const auto& v : col) nonzero = nonzero || !scal::is_zero(v);
      if (!nonzero) throw std::invalid_argument("forcing: zero column");
    }
  }
};

enum class Verdict { Degenerate, Nondegenerate, Inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Degenerate: return "degenerate";
    case Verdict::Nondegenerate: return "nondegenerate";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

template <class S>
struct HullReport {
  Verdict verdict = Verdict::Inconclusive;
  SubspaceBasis<S> closure;
  int iterations = 0;
  std::optional<SubspaceBasis<S>> witness;  // the proper invariant subspace, when degenerate
  bool borderline = false;                  // a float rank decision fell near the cutoff
  int n_samples = 0;                        // constrained checker only
  int dim = 0;
  std::string mode;       // "exact" or "float"
  double tolerance = 0;   // relative SV cutoff in float mode
  double recheck_residual = 0;  // certificate re-check (0 in exact mode)
};

// ---------------------------------------------------------------------------
// basis reduction and closure drivers

template <class S>
SubspaceBasis<S> make_basis(const std::vector<Vec<S>>& gens, int n, bool* borderline = nullptr) {
  RankResult rr = row_rank(gens, n);
  if (borderline && rr.borderline) *borderline = true;
  SubspaceBasis<S> b;
  b.rank = rr.rank;
  b.vectors.reserve(rr.pivot_rows.size());
  for (int idx : rr.pivot_rows) b.vectors.push_back(gens[idx]);
  return b;
}

/// Grows seed under `generate` until the rank stabilizes (at most n steps).
template <class S>
SubspaceBasis<S> span_closure(
    const std::vector<Vec<S>>& seed, int n,
    const std::function<std::vector<Vec<S>>(const std::vector<Vec<S>>&)>& generate,
    int* iterations_out = nullptr, bool* borderline = nullptr) {
  SubspaceBasis<S> basis = make_basis(seed, n, borderline);
  int iterations = 0;
  while (basis.rank < n) {
    std::vector<Vec<S>> all = basis.vectors;
    for (auto& v : generate(basis.vectors)) all.push_back(std::move(v));
    SubspaceBasis<S> next = make_basis(all, n, borderline);
    ++iterations;
    if (next.rank == basis.rank) break;
    basis = std::move(next);
    if (iterations > n + 1) break;  // rank is monotone; cannot happen
  }
  if (iterations_out) *iterations_out = iterations;
  return basis;
}

/// Minimal subspace containing the seed with q(u,v) inside it for all members.
template <class S>
SubspaceBasis<S> q_invariant_closure(const std::vector<Vec<S>>& seed, const ArnoldForm<S>& form,
                                     int* iterations = nullptr, bool* borderline = nullptr) {
  if (seed.empty()) throw std::invalid_argument("q_invariant_closure: empty seed");
  const int n = form.dim;
  auto gen = [&form](const std::vector<Vec<S>>& basis) {
    std::vector<Vec<S>> out;
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i; j < basis.size(); ++j)
        out.push_back(form.q_apply(basis[i], basis[j]));
    return out;
  };
  return span_closure<S>(seed, n, gen, iterations, borderline);
}

/// Smallest Lie subalgebra containing the seed vectors.
template <class S>
SubspaceBasis<S> lie_generated_subalgebra(const std::vector<Vec<S>>& seed, const LieAlgebra<S>& alg,
                                          int* iterations = nullptr, bool* borderline = nullptr) {
  if (seed.empty()) throw std::invalid_argument("lie_generated_subalgebra: empty seed");
  auto gen = [&alg](const std::vector<Vec<S>>& basis) {
    std::vector<Vec<S>> out;
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i + 1; j < basis.size(); ++j)
        out.push_back(bracket(alg, basis[i], basis[j]));
    return out;
  };
  return span_closure<S>(seed, alg.dim, gen, iterations, borderline);
}

/// Smallest subalgebra containing all pairwise differences of the samples and
/// invariant under ad z0, z0 = first sample. (Differences against z0 span the
/// same space as all pairwise differences.)
template <class S>
SubspaceBasis<S> p_hull(const std::vector<Vec<S>>& samples, const LieAlgebra<S>& alg,
                        int* iterations = nullptr, bool* borderline = nullptr) {
  if (samples.empty()) throw std::invalid_argument("p_hull: empty sample list");
  const int n = alg.dim;
  const Vec<S>& z0 = samples.front();
  std::vector<Vec<S>> seed;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    Vec<S> d(n);
    for (int k = 0; k < n; ++k) d[k] = samples[i][k] - z0[k];
    seed.push_back(std::move(d));
  }
  if (seed.empty()) {  // singleton: S - S = {0}
    SubspaceBasis<S> zero;
    if (iterations) *iterations = 0;
    return zero;
  }
  auto gen = [&alg, &z0](const std::vector<Vec<S>>& basis) {
    std::vector<Vec<S>> out;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      out.push_back(bracket(alg, z0, basis[i]));
      for (std::size_t j = i + 1; j < basis.size(); ++j)
        out.push_back(bracket(alg, basis[i], basis[j]));
    }
    return out;
  };
  return span_closure<S>(seed, n, gen, iterations, borderline);
}

// ---------------------------------------------------------------------------
// certificate re-checks

/// Max relative distance of the vectors from span(basis); exact mode gives 0/1.
template <class S>
double subspace_membership_residual(const std::vector<Vec<S>>& vectors,
                                    const SubspaceBasis<S>& basis, int n) {
  if constexpr (scal::is_exact<S>) {
    std::vector<Vec<S>> all = basis.vectors;
    for (const auto& v : vectors) all.push_back(v);
    return row_rank(all, n).rank == basis.rank ? 0.0 : 1.0;
  } else {
    if (basis.vectors.empty()) {
      double worst = 0;
      for (const auto& v : vectors)
        for (double x : v) worst = std::max(worst, std::abs(x));
      return worst;
    }
    Eigen::MatrixXd B(n, static_cast<int>(basis.vectors.size()));
    for (int j = 0; j < B.cols(); ++j)
      for (int i = 0; i < n; ++i) B(i, j) = basis.vectors[j][i];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
    double worst = 0;
    for (const auto& v : vectors) {
      Eigen::Map<const Eigen::VectorXd> ve(v.data(), n);
      const double norm = ve.norm();
      if (norm == 0) continue;
      Eigen::VectorXd resid = ve - B * qr.solve(ve);
      worst = std::max(worst, resid.norm() / norm);
    }
    return worst;
  }
}

/// Residual of "q maps basis x basis into span(basis)".
template <class S>
double verify_q_invariant(const SubspaceBasis<S>& basis, const ArnoldForm<S>& form) {
  std::vector<Vec<S>> images;
  for (std::size_t i = 0; i < basis.vectors.size(); ++i)
    for (std::size_t j = i; j < basis.vectors.size(); ++j)
      images.push_back(form.q_apply(basis.vectors[i], basis.vectors[j]));
  return subspace_membership_residual(images, basis, form.dim);
}

/// Residual of "brackets and ad z0 map the basis into its own span".
template <class S>
double verify_p_hull_invariant(const SubspaceBasis<S>& basis, const LieAlgebra<S>& alg,
                               const Vec<S>& z0) {
  std::vector<Vec<S>> images;
  for (std::size_t i = 0; i < basis.vectors.size(); ++i) {
    images.push_back(bracket(alg, z0, basis.vectors[i]));
    for (std::size_t j = i + 1; j < basis.vectors.size(); ++j)
      images.push_back(bracket(alg, basis.vectors[i], basis.vectors[j]));
  }
  return subspace_membership_residual(images, basis, alg.dim);
}

// ---------------------------------------------------------------------------
// the two theorem checkers

/// Langevin model: hypoelliptic iff the q-invariant closure of range(sigma) is everything.
template <class S>
HullReport<S> check_langevin_hormander(const LieAlgebra<S>& alg, const ArnoldForm<S>& form,
                                       const Forcing<S>& forcing) {
  forcing.validate(alg.dim);
  HullReport<S> rep;
  rep.dim = alg.dim;
  rep.mode = scal::is_exact<S> ? "exact" : "float";
  rep.tolerance = scal::is_exact<S> ? 0.0 : kRankRelTol;
  rep.closure = q_invariant_closure(forcing.columns, form, &rep.iterations, &rep.borderline);
  rep.verdict = rep.closure.rank == alg.dim ? Verdict::Nondegenerate : Verdict::Degenerate;
  if (rep.verdict == Verdict::Degenerate) {
    rep.witness = rep.closure;
    rep.recheck_residual = verify_q_invariant(rep.closure, form);
  }
  return rep;
}

/// Constrained model: hypoelliptic iff the p-hull of the sampled manifold is everything.
/// `sample(k)` must return k deterministic low-discrepancy points of Z.
inline HullReport<double> check_constrained_hormander(
    const std::function<std::vector<Vec<double>>(int)>& sample, const LieAlgebra<double>& alg,
    int initial_samples = 8, int max_samples = 1024) {
  HullReport<double> rep;
  rep.dim = alg.dim;
  rep.mode = "float";
  rep.tolerance = kRankRelTol;
  int prev_rank = -1, stable = 0;
  std::vector<Vec<double>> samples;
  for (int k = initial_samples; k <= max_samples; k *= 2) {
    samples = sample(k);
    rep.n_samples = k;
    rep.closure = p_hull(samples, alg, &rep.iterations, &rep.borderline);
    if (rep.closure.rank == alg.dim) {
      rep.verdict = Verdict::Nondegenerate;
      return rep;
    }
    if (rep.closure.rank == prev_rank) {
      if (++stable >= 2) break;
    } else {
      stable = 0;
    }
    prev_rank = rep.closure.rank;
  }
  if (stable >= 2) {
    rep.verdict = Verdict::Degenerate;
    rep.witness = rep.closure;
    rep.recheck_residual = verify_p_hull_invariant(rep.closure, alg, samples.front());
  } else {
    rep.verdict = Verdict::Inconclusive;  // rank never stabilized within the cap
  }
  return rep;
}

/// Float check with automatic exact-mode escalation when the float rank
/// decision lands near the cutoff. Exact data is available for presets and
/// for algebra files, so escalation never fails there.
struct LangevinCheckOutcome {
  HullReport<double> float_report;
  std::optional<HullReport<Rat>> exact_report;
  bool escalated = false;

  Verdict verdict() const { return exact_report ? exact_report->verdict : float_report.verdict; }
};

inline LangevinCheckOutcome check_langevin_auto(const LieAlgebra<Rat>& alg_exact,
                                                const Forcing<Rat>& forcing_exact,
                                                bool force_exact = false) {
  LangevinCheckOutcome out;
  LieAlgebra<double> alg = to_double_algebra(alg_exact);
  ArnoldForm<double> form = arnold_form(alg);
  Forcing<double> forcing;
  for (const auto& col : forcing_exact.columns) forcing.columns.push_back(to_double_vec(col));
  out.float_report = check_langevin_hormander(alg, form, forcing);
  if (force_exact || out.float_report.borderline) {
    ArnoldForm<Rat> form_exact = arnold_form(alg_exact);
    out.exact_report = check_langevin_hormander(alg_exact, form_exact, forcing_exact);
    out.escalated = !force_exact;
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON report serialization

inline nlohmann::json scalar_json(double v) { return v; }
inline nlohmann::json scalar_json(const Rat& v) { return v.get_str(); }

template <class S>
nlohmann::json basis_json(const SubspaceBasis<S>& b) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& v : b.vectors) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& x : v) row.push_back(scalar_json(x));
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"rank", b.rank}, {"vectors", rows}};
}

template <class S>
nlohmann::json report_json(const HullReport<S>& r) {
  nlohmann::json j{
      {"verdict", verdict_name(r.verdict)},
      {"dim", r.dim},
      {"rank", r.closure.rank},
      {"iterations", r.iterations},
      {"mode", r.mode},
      {"tolerance", r.tolerance},
      {"borderline", r.borderline},
      {"recheck_residual", r.recheck_residual},
      {"closure_basis", basis_json(r.closure)},
  };
  if (r.n_samples > 0) j["n_samples"] = r.n_samples;
  if (r.witness) j["witness"] = basis_json(*r.witness);
  return j;
}

inline nlohmann::json outcome_json(const LangevinCheckOutcome& o) {
  nlohmann::json j{{"verdict", verdict_name(o.verdict())},
                   {"float", report_json(o.float_report)},
                   {"escalated_to_exact", o.escalated}};
  if (o.exact_report) j["exact"] = report_json(*o.exact_report);
  return j;
}

}  // namespace geoflow

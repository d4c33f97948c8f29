// Copyright 2026 The biqap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <limits>

#include "biqap/conic.hpp"
#include "biqap/qcore.hpp"

namespace biqap::divergences {

enum class Method { closed_form, sdp, eigen };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::closed_form:
      return "closed-form";
    case Method::sdp:
      return "sdp";
    case Method::eigen:
      return "eigen";
  }
  return "unknown";
}

/** A divergence in bits, or +∞ when the support condition fails. */
struct DivergenceValue {
  double value = 0.0;
  bool infinite = false;
  Method method = Method::closed_form;
  /** Cross-check residual; for D_max the eigen/SDP disagreement in bits. */
  double residual = 0.0;
  /** Second evaluation when one exists (SDP value for D_max). */
  double alternate = 0.0;
  /** Value hit the configured cap (hypothesis testing only). */
  bool capped = false;
  conic::Status status = conic::Status::optimal;

  static DivergenceValue infinity(Method m) {
    DivergenceValue v;
    v.value = std::numeric_limits<double>::infinity();
    v.infinite = true;
    v.method = m;
    return v;
  }
};

struct Options {
  /** σ-eigenvalues below support_tol·λ_max(σ) are treated as zero. */
  double support_tol = 1e-12;
  /** ρ-weight on the null space of σ above this means support violation. */
  double leak_tol = 1e-10;
  double cap_bits = 60.0;
  double sdp_tol = 1e-9;
  /** Tolerance for the D_max cross-check SDP. */
  double dmax_sdp_tol = 1e-8;
};

namespace detail {

struct Support {
  CMat basis;  // columns spanning supp(σ)
  RVec values;
  CMat null_basis;
};

inline Support support_of(const CMat& sigma, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(qcore::hermitian_part(sigma));
  const RVec& ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 0.0);
  std::vector<int> keep, drop;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > rel_tol * top && ev(i) > 0.0) {
      keep.push_back(static_cast<int>(i));
    } else {
      drop.push_back(static_cast<int>(i));
    }
  }
  Support s;
  s.basis.resize(sigma.rows(), static_cast<long>(keep.size()));
  s.values.resize(static_cast<long>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    s.basis.col(static_cast<long>(k)) = es.eigenvectors().col(keep[k]);
    s.values(static_cast<long>(k)) = ev(keep[k]);
  }
  s.null_basis.resize(sigma.rows(), static_cast<long>(drop.size()));
  for (size_t k = 0; k < drop.size(); ++k) {
    s.null_basis.col(static_cast<long>(k)) = es.eigenvectors().col(drop[k]);
  }
  return s;
}

inline bool support_violated(const CMat& rho, const Support& s, double leak_tol) {
  if (s.null_basis.cols() == 0) return false;
  const double leak = (s.null_basis.adjoint() * rho * s.null_basis).trace().real();
  return leak > leak_tol;
}

inline void check_dims(const CMat& rho, const CMat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols()) {
    throw std::invalid_argument("divergence: dimension mismatch");
  }
}

/** σ^p on its support (pseudo-power for negative p). */
inline CMat support_power(const Support& s, double p) {
  RVec pv(s.values.size());
  for (Eigen::Index i = 0; i < pv.size(); ++i) pv(i) = std::pow(s.values(i), p);
  return s.basis * pv.cast<cplx>().asDiagonal() * s.basis.adjoint();
}

}  // namespace detail

/** Umegaki relative entropy D(ρ‖σ) in bits. */
inline DivergenceValue relative_entropy(const CMat& rho, const CMat& sigma,
                                        const Options& opt = {}) {
  detail::check_dims(rho, sigma);
  const auto s = detail::support_of(sigma, opt.support_tol);
  if (detail::support_violated(rho, s, opt.leak_tol)) {
    return DivergenceValue::infinity(Method::eigen);
  }
  RVec lv(s.values.size());
  for (Eigen::Index i = 0; i < lv.size(); ++i) lv(i) = std::log2(s.values(i));
  const CMat log_sigma = s.basis * lv.cast<cplx>().asDiagonal() * s.basis.adjoint();
  const double cross = (qcore::hermitian_part(rho) * log_sigma).trace().real();
  DivergenceValue v;
  v.method = Method::eigen;
  v.value = -qcore::von_neumann_entropy(rho) - cross;
  return v;
}

/** log₂ λ_max(σ^{-1/2} ρ σ^{-1/2}) on supp(σ). */
inline DivergenceValue max_relative_entropy_eigen(const CMat& rho, const CMat& sigma,
                                                  const Options& opt = {}) {
  detail::check_dims(rho, sigma);
  const auto s = detail::support_of(sigma, opt.support_tol);
  if (detail::support_violated(rho, s, opt.leak_tol)) {
    return DivergenceValue::infinity(Method::eigen);
  }
  RVec is(s.values.size());
  for (Eigen::Index i = 0; i < is.size(); ++i) is(i) = 1.0 / std::sqrt(s.values(i));
  const CMat r = s.basis.adjoint() * rho * s.basis;
  const CMat m = is.cast<cplx>().asDiagonal() * r * is.cast<cplx>().asDiagonal();
  DivergenceValue v;
  v.method = Method::eigen;
  v.value = std::log2(qcore::max_eigenvalue(m));
  return v;
}

/** min{λ : ρ ≤ 2^λ σ} as an SDP restricted to supp(σ). */
inline DivergenceValue max_relative_entropy_sdp(const CMat& rho, const CMat& sigma,
                                                const Options& opt = {}) {
  detail::check_dims(rho, sigma);
  const auto s = detail::support_of(sigma, opt.support_tol);
  if (detail::support_violated(rho, s, opt.leak_tol)) {
    return DivergenceValue::infinity(Method::sdp);
  }
  const CMat r = s.basis.adjoint() * rho * s.basis;
  const CMat sg = s.values.cast<cplx>().asDiagonal();
  conic::ConicProgram p;
  const int t = p.add_variable("s", 1, conic::Cone::free);
  p.add_constraint("dominance", {{t, conic::scalar_times(sg)}}, conic::Relation::psd,
                   qcore::hermitian_part(r));
  p.set_linear_objective(conic::Sense::minimize, {{t, CMat::Ones(1, 1)}});
  conic::SolverOptions so;
  so.tol = opt.dmax_sdp_tol;
  const auto sol = conic::solve(p, so);
  DivergenceValue v;
  v.method = Method::sdp;
  v.status = sol.status;
  v.value = std::log2(sol.primal_value);
  v.residual = sol.gap;
  return v;
}

/**
 * D_max computed by eigen form and SDP. `value` holds the eigen result,
 * `alternate` the SDP result and `residual` their difference.
 */
inline DivergenceValue max_relative_entropy(const CMat& rho, const CMat& sigma,
                                            const Options& opt = {}) {
  DivergenceValue e = max_relative_entropy_eigen(rho, sigma, opt);
  if (e.infinite) return e;
  const DivergenceValue s = max_relative_entropy_sdp(rho, sigma, opt);
  e.alternate = s.value;
  e.status = s.status;
  e.residual = std::abs(e.value - s.value);
  return e;
}

/** Sandwiched Rényi divergence D̃_α(ρ‖σ) in bits. */
inline DivergenceValue sandwiched_renyi(const CMat& rho, const CMat& sigma, double alpha,
                                        const Options& opt = {}) {
  detail::check_dims(rho, sigma);
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw std::invalid_argument("sandwiched_renyi: alpha must lie in (0,1) or (1,inf)");
  }
  const auto s = detail::support_of(sigma, opt.support_tol);
  if (alpha > 1.0 && detail::support_violated(rho, s, opt.leak_tol)) {
    return DivergenceValue::infinity(Method::eigen);
  }
  const double gamma = (1.0 - alpha) / (2.0 * alpha);
  const CMat sp = detail::support_power(s, gamma);
  const CMat inner = sp * qcore::hermitian_part(rho) * sp;
  const RVec ev = qcore::eigenvalues_hermitian(inner);
  double q = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > 0.0) q += std::pow(ev(i), alpha);
  }
  if (q <= 0.0) return DivergenceValue::infinity(Method::eigen);
  DivergenceValue v;
  v.method = Method::eigen;
  v.value = std::log2(q) / (alpha - 1.0);
  return v;
}

/** D_h^ε(ρ‖σ) = −log₂ min{Tr Λσ : 0 ≤ Λ ≤ I, Tr Λρ ≥ 1−ε}. */
inline DivergenceValue hypothesis_testing_divergence(const CMat& rho, const CMat& sigma,
                                                     double eps, const Options& opt = {}) {
  detail::check_dims(rho, sigma);
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::out_of_range("hypothesis_testing_divergence: epsilon outside [0,1]");
  }
  const int n = static_cast<int>(rho.rows());
  conic::ConicProgram p;
  const int l = p.add_variable("Lambda", n);
  p.add_constraint("upper", {{l, conic::scale(conic::identity_map(n), -1.0)}},
                   conic::Relation::psd, CMat(-CMat::Identity(n, n)));
  p.add_constraint("type1", {{l, conic::inner_product_map(qcore::hermitian_part(rho))}},
                   conic::Relation::psd, CMat::Constant(1, 1, 1.0 - eps));
  p.set_linear_objective(conic::Sense::minimize, {{l, qcore::hermitian_part(sigma)}});
  conic::SolverOptions so;
  so.tol = opt.sdp_tol;
  const auto sol = conic::solve(p, so);
  DivergenceValue v;
  v.method = Method::sdp;
  v.status = sol.status;
  v.residual = sol.gap;
  // below the solver's absolute resolution the optimum is indistinguishable from 0
  const double floor = std::max(std::exp2(-opt.cap_bits), 10.0 * opt.sdp_tol);
  if (sol.status == conic::Status::infeasible) {
    v.value = std::numeric_limits<double>::infinity();
    v.infinite = true;
    return v;
  }
  if (sol.primal_value <= floor) {
    v.value = opt.cap_bits;
    v.capped = true;
    return v;
  }
  v.value = -std::log2(sol.primal_value);
  return v;
}

// DensityOperator conveniences

inline DivergenceValue relative_entropy(const DensityOperator& rho, const DensityOperator& sigma,
                                        const Options& opt = {}) {
  return relative_entropy(rho.matrix(), sigma.matrix(), opt);
}

inline DivergenceValue max_relative_entropy(const DensityOperator& rho,
                                            const DensityOperator& sigma,
                                            const Options& opt = {}) {
  return max_relative_entropy(rho.matrix(), sigma.matrix(), opt);
}

inline DivergenceValue sandwiched_renyi(const DensityOperator& rho, const DensityOperator& sigma,
                                        double alpha, const Options& opt = {}) {
  return sandwiched_renyi(rho.matrix(), sigma.matrix(), alpha, opt);
}

inline DivergenceValue hypothesis_testing_divergence(const DensityOperator& rho,
                                                     const DensityOperator& sigma, double eps,
                                                     const Options& opt = {}) {
  return hypothesis_testing_divergence(rho.matrix(), sigma.matrix(), eps, opt);
}

}  // namespace biqap::divergences

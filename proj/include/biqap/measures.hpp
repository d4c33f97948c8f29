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

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "biqap/channels.hpp"
#include "biqap/conic.hpp"
#include "biqap/divergences.hpp"
#include "biqap/qcore.hpp"
#include "biqap/random.hpp"

namespace biqap::measures {

enum class BoundKind { exact_sdp, ppt_relaxation, fw_upper_estimate, heuristic_lower };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::exact_sdp:
      return "exact-sdp";
    case BoundKind::ppt_relaxation:
      return "ppt-relaxation";
    case BoundKind::fw_upper_estimate:
      return "fw-upper-estimate";
    case BoundKind::heuristic_lower:
      return "heuristic-lower";
  }
  return "unknown";
}

/** Left : right split of the subsystems; the right side is transposed. */
struct BipartiteCut {
  std::vector<int> left;
  std::vector<int> right;

  void validate(int n_subsystems) const {
    std::vector<int> all = left;
    all.insert(all.end(), right.begin(), right.end());
    std::sort(all.begin(), all.end());
    if (left.empty() || right.empty() || static_cast<int>(all.size()) != n_subsystems) {
      throw std::invalid_argument("BipartiteCut: cut must cover all subsystems");
    }
    for (int k = 0; k < n_subsystems; ++k) {
      if (all[k] != k) throw std::invalid_argument("BipartiteCut: cut sides overlap or skip");
    }
  }

  /** First `n_left` subsystems versus the rest. */
  static BipartiteCut split(int n_left, int n_subsystems) {
    BipartiteCut c;
    for (int k = 0; k < n_subsystems; ++k) (k < n_left ? c.left : c.right).push_back(k);
    return c;
  }
};

struct BoundReport {
  std::string name;
  double value_bits = 0.0;
  /** W, Γ or μ before taking log₂; equals value_bits for FW estimates. */
  double linear_value = 0.0;
  BoundKind kind = BoundKind::exact_sdp;
  /** Relative duality gap for SDPs, FW linearization gap for estimates. */
  double gap = 0.0;
  conic::Status status = conic::Status::optimal;
  int iterations = 0;
  bool converged = true;
  /** Restart values or objective history. */
  std::vector<double> trace;
  /** Optimal variables keyed by name when available. */
  std::map<std::string, CMat> certificates;
};

inline double log2_positive(double x) {
  return x > 0.0 ? std::log2(x) : -std::numeric_limits<double>::infinity();
}

// ---- register symmetry ----

/**
 * Block pattern for operators on S ⊗ A ⊗ rest that commute with D_θ ⊗ D̄_θ ⊗ I
 * for all diagonal phase unitaries D_θ: index (s, a) lies in group 0 if s = a
 * and in its own group otherwise.
 */
inline conic::Pattern register_pattern(int d_s, int d_a, int rest) {
  conic::Pattern p(1);
  std::vector<std::vector<int>> off(static_cast<size_t>(d_s) * d_a);
  for (int s = 0; s < d_s; ++s) {
    for (int a = 0; a < d_a; ++a) {
      for (int r = 0; r < rest; ++r) {
        const int idx = (s * d_a + a) * rest + r;
        if (s == a) {
          p[0].push_back(idx);
        } else {
          off[static_cast<size_t>(s) * d_a + a].push_back(idx);
        }
      }
    }
  }
  for (auto& g : off) {
    if (!g.empty()) p.push_back(std::move(g));
  }
  return p;
}

/** Groups {s} ⊗ rest for operators block diagonal in the first factor. */
inline conic::Pattern leading_block_pattern(int d_s, int rest) {
  conic::Pattern p(d_s);
  for (int s = 0; s < d_s; ++s) {
    for (int r = 0; r < rest; ++r) p[s].push_back(s * rest + r);
  }
  return p;
}

/** Checks invariance of M on S ⊗ A ⊗ rest under D_θ ⊗ D̄_θ ⊗ I at generic phases. */
inline bool has_register_symmetry(const CMat& m, int d_s, int d_a, double tol = 1e-10) {
  if (d_s != d_a || d_s < 2 || m.rows() % (static_cast<long>(d_s) * d_a) != 0) return false;
  const long rest = m.rows() / (static_cast<long>(d_s) * d_a);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (double seed : {std::sqrt(2.0), std::sqrt(3.0) - 1.0}) {
    CVec ph(m.rows());
    for (int s = 0; s < d_s; ++s) {
      for (int a = 0; a < d_a; ++a) {
        const double th = seed * (s * (s + 1) + 1.0) - seed * (a * (a + 1) + 1.0);
        for (long r = 0; r < rest; ++r) ph((s * d_a + a) * rest + r) = std::polar(1.0, 7.0 * th);
      }
    }
    const CMat rot = ph.asDiagonal() * m * ph.conjugate().asDiagonal();
    if ((rot - m).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

// ---- max-Rains SDPs ----

enum class GammaForm { primal, dual };

namespace detail {

struct GammaSetup {
  CMat J;
  Dims dims;
  std::vector<int> keep;       // reference systems S…
  std::vector<int> traced;     // outputs traced in the objective
  std::vector<int> transpose;  // Bob's side
  conic::Pattern x_pattern;
  conic::Pattern rho_pattern;
};

inline std::vector<int> lift_permutation(const std::vector<int>& keep,
                                         const std::vector<int>& traced) {
  std::vector<int> order = keep;
  order.insert(order.end(), traced.begin(), traced.end());
  std::vector<int> perm(order.size());
  for (size_t k = 0; k < order.size(); ++k) {
    perm[k] = static_cast<int>(std::find(order.begin(), order.end(), static_cast<int>(k)) -
                               order.begin());
  }
  return perm;
}

inline conic::ConicProgram gamma_program(const GammaSetup& g, GammaForm form) {
  using namespace conic;
  const int n = static_cast<int>(g.J.rows());
  const LinearMap pt = partial_transpose_map(g.dims, g.transpose);
  ConicProgram p;
  if (form == GammaForm::dual) {
    const int v = p.add_variable("V", n, Cone::psd, g.x_pattern);
    const int y = p.add_variable("Y", n, Cone::psd, g.x_pattern);
    p.add_constraint("dominate", {{v, pt}, {y, scale(pt, -1.0)}}, Relation::psd, g.J,
                     g.x_pattern);
    const LinearMap tr = partial_trace_map(g.dims, g.keep);
    p.set_norm_objective({{v, tr}, {y, tr}}, CMat(), true, g.rho_pattern);
    return p;
  }
  Dims kd, td;
  for (int k : g.keep) kd.push_back(g.dims[k]);
  for (int k : g.traced) td.push_back(g.dims[k]);
  const int nk = static_cast<int>(qcore::dim_product(kd));
  const int x = p.add_variable("X", n, Cone::psd, g.x_pattern);
  const int r = p.add_variable("rho", nk, Cone::psd, g.rho_pattern);
  const LinearMap lift = tensor_identity_map(kd, td, lift_permutation(g.keep, g.traced));
  p.add_constraint("upper", {{r, lift}, {x, scale(pt, -1.0)}}, Relation::psd, CMat::Zero(n, n),
                   g.x_pattern);
  p.add_constraint("lower", {{r, lift}, {x, pt}}, Relation::psd, CMat::Zero(n, n), g.x_pattern);
  p.add_constraint("normalization", {{r, trace_map(nk)}}, Relation::equal, CMat::Ones(1, 1));
  p.set_linear_objective(Sense::maximize, {{x, g.J}});
  return p;
}

inline BoundReport gamma_solve(const GammaSetup& g, GammaForm form, const std::string& name,
                               double tol) {
  const conic::ConicProgram prog = gamma_program(g, form);
  const conic::ConicSolution sol = conic::solve(prog, tol);
  BoundReport r;
  r.name = name;
  r.kind = BoundKind::exact_sdp;
  r.status = sol.status;
  r.linear_value = sol.primal_value;
  r.value_bits = log2_positive(sol.primal_value);
  r.gap = sol.gap;
  r.iterations = sol.iterations;
  r.converged = sol.optimal();
  r.trace = {sol.primal_value, sol.dual_value};
  r.certificates = sol.variable_values;
  return r;
}

}  // namespace detail

struct GammaOptions {
  double tol = 1e-9;
  /** Use the register phase symmetry when the Choi operator has it. */
  bool use_symmetry = true;
};

/** R_max(N) = log₂ Γ(N) for a point-to-point channel. */
inline BoundReport gamma_channel(const channels::ChannelChoi& n, GammaForm form = GammaForm::dual,
                                 const GammaOptions& opt = {}) {
  detail::GammaSetup g;
  g.J = n.J;
  g.dims = {n.d_in, n.d_out};
  g.keep = {0};
  g.traced = {1};
  g.transpose = {1};
  return detail::gamma_solve(g, form, "R_max(channel)", opt.tol);
}

inline detail::GammaSetup bidirectional_setup(const channels::BidirectionalChannel& n,
                                              const GammaOptions& opt) {
  detail::GammaSetup g;
  g.J = n.J;
  g.dims = n.choi_dims();
  g.keep = {0, 3};
  g.traced = {1, 2};
  g.transpose = {2, 3};
  if (opt.use_symmetry && has_register_symmetry(n.J, n.d_ap, n.d_a)) {
    g.x_pattern = register_pattern(n.d_ap, n.d_a, n.d_b * n.d_bp);
    g.rho_pattern = leading_block_pattern(n.d_ap, n.d_bp);
  }
  return g;
}

/** R²→²_max(N) = log₂ Γ²→²(N) from either SDP form. */
inline BoundReport gamma_bidirectional(const channels::BidirectionalChannel& n,
                                       GammaForm form = GammaForm::dual,
                                       const GammaOptions& opt = {}) {
  return detail::gamma_solve(bidirectional_setup(n, opt), form,
                             form == GammaForm::dual ? "R2to2_max(dual)" : "R2to2_max(primal)",
                             opt.tol);
}

struct GammaPair {
  BoundReport primal;
  BoundReport dual;
  /** |Γ_primal − Γ_dual| / max(1, Γ_dual). */
  double relative_difference = 0.0;
};

inline GammaPair gamma_bidirectional_both(const channels::BidirectionalChannel& n,
                                          const GammaOptions& opt = {}) {
  GammaPair p;
  p.primal = gamma_bidirectional(n, GammaForm::primal, opt);
  p.dual = gamma_bidirectional(n, GammaForm::dual, opt);
  p.relative_difference = std::abs(p.primal.linear_value - p.dual.linear_value) /
                          std::max(1.0, std::abs(p.dual.linear_value));
  return p;
}

// ---- state SDPs ----

struct StateSdpOptions {
  double tol = 1e-9;
  /** Optional block pattern shared by all matrix variables. */
  conic::Pattern pattern;
};

/** W(A;B)_ρ = min Tr(C + D) s.t. T_B(C − D) ⪰ ρ; R_max = log₂ W. */
inline BoundReport w_state(const CMat& rho, const Dims& dims, const BipartiteCut& cut,
                           const StateSdpOptions& opt = {}) {
  using namespace conic;
  cut.validate(static_cast<int>(dims.size()));
  const int n = static_cast<int>(rho.rows());
  if (qcore::dim_product(dims) != n) throw std::invalid_argument("w_state: dims mismatch");
  ConicProgram p;
  const int c = p.add_variable("C", n, Cone::psd, opt.pattern);
  const int d = p.add_variable("D", n, Cone::psd, opt.pattern);
  const LinearMap pt = partial_transpose_map(dims, cut.right);
  p.add_constraint("dominate", {{c, pt}, {d, scale(pt, -1.0)}}, Relation::psd, rho, opt.pattern);
  const CMat eye = CMat::Identity(n, n);
  p.set_linear_objective(Sense::minimize, {{c, eye}, {d, eye}});
  const ConicSolution sol = solve(p, opt.tol);
  BoundReport r;
  r.name = "R_max(state)";
  r.kind = BoundKind::exact_sdp;
  r.status = sol.status;
  r.linear_value = sol.primal_value;
  r.value_bits = log2_positive(sol.primal_value);
  r.gap = sol.gap;
  r.iterations = sol.iterations;
  r.converged = sol.optimal();
  r.trace = {sol.primal_value, sol.dual_value};
  return r;
}

inline BoundReport w_state(const DensityOperator& rho, const BipartiteCut& cut,
                           const StateSdpOptions& opt = {}) {
  return w_state(rho.matrix(), rho.dims(), cut, opt);
}

/**
 * PPT-relaxed E_max: μ = min Tr G s.t. G ⪰ ρ, T_B G ⪰ 0, value log₂ μ. The
 * multiplier of G ⪰ ρ is returned as certificate "gradient" (∂μ/∂ρ).
 */
inline BoundReport e_max_ppt(const CMat& rho, const Dims& dims, const BipartiteCut& cut,
                             const StateSdpOptions& opt = {}) {
  using namespace conic;
  cut.validate(static_cast<int>(dims.size()));
  const int n = static_cast<int>(rho.rows());
  if (qcore::dim_product(dims) != n) throw std::invalid_argument("e_max_ppt: dims mismatch");
  ConicProgram p;
  const int g = p.add_variable("G", n, Cone::psd, opt.pattern);
  p.add_constraint("dominate", {{g, identity_map(n)}}, Relation::psd, rho, opt.pattern);
  p.add_constraint("ppt", {{g, partial_transpose_map(dims, cut.right)}}, Relation::psd,
                   CMat::Zero(n, n), opt.pattern);
  p.set_linear_objective(Sense::minimize, {{g, CMat::Identity(n, n)}});
  const ConicSolution sol = solve(p, opt.tol);
  BoundReport r;
  r.name = "E_max(PPT)";
  r.kind = BoundKind::ppt_relaxation;
  r.status = sol.status;
  r.linear_value = sol.primal_value;
  r.value_bits = log2_positive(sol.primal_value);
  r.gap = sol.gap;
  r.iterations = sol.iterations;
  r.converged = sol.optimal();
  r.trace = {sol.primal_value, sol.dual_value};
  if (sol.constraint_duals.count("dominate")) {
    r.certificates["gradient"] = sol.dual("dominate");
  }
  r.certificates["G"] = sol.value("G");
  return r;
}

inline BoundReport e_max_ppt(const DensityOperator& rho, const BipartiteCut& cut,
                             const StateSdpOptions& opt = {}) {
  return e_max_ppt(rho.matrix(), rho.dims(), cut, opt);
}

// ---- Frank–Wolfe ----

struct FwConfig {
  int max_iterations = 500;
  /** Stop once the linearization gap (bits) is at most this. */
  double tol = 1e-4;
  double armijo = 1e-4;
  double sdp_tol = 1e-9;
  bool away_steps = true;
  /** Pairwise steps among active atoms after each oracle call. */
  int inner_iterations = 100;
  /**
   * Seed the iteration with the relaxed SDP optimum (max-Rains or PPT
   * E_max) when it beats π.
   */
  bool sdp_start = true;
  /** Extra feasible start points; the best finite one is used. */
  std::vector<CMat> start_candidates;
};

enum class FeasibleSet {
  /** σ ⪰ 0, ‖T_B σ‖₁ ≤ 1. */
  ppt_prime,
  /** σ ⪰ 0, Tr σ = 1, T_B σ ⪰ 0. */
  ppt_states,
};

namespace detail {

/** Objective value and gradient; returns false when f = +∞. */
using ValueGrad = std::function<bool(const CMat&, double&, CMat*)>;

inline CMat linear_oracle(const CMat& grad, const Dims& dims, const std::vector<int>& transpose,
                          FeasibleSet set, double tol, conic::Status& status) {
  using namespace conic;
  const int n = static_cast<int>(grad.rows());
  ConicProgram p;
  const int s = p.add_variable("sigma", n);
  const LinearMap pt = partial_transpose_map(dims, transpose);
  if (set == FeasibleSet::ppt_prime) {
    const int pp = p.add_variable("P", n);
    const int nn = p.add_variable("N", n);
    const int slack = p.add_variable("slack", 1);
    p.add_constraint("split", {{s, pt}, {pp, scale(identity_map(n), -1.0)}, {nn, identity_map(n)}},
                     Relation::equal, CMat::Zero(n, n));
    p.add_constraint("budget", {{pp, trace_map(n)}, {nn, trace_map(n)}, {slack, identity_map(1)}},
                     Relation::equal, CMat::Ones(1, 1));
  } else {
    p.add_constraint("ppt", {{s, pt}}, Relation::psd, CMat::Zero(n, n));
    p.add_constraint("trace", {{s, trace_map(n)}}, Relation::equal, CMat::Ones(1, 1));
  }
  p.set_linear_objective(Sense::minimize, {{s, grad}});
  const ConicSolution sol = solve(p, tol);
  status = sol.status;
  return qcore::hermitian_part(sol.value("sigma"));
}

inline double re_inner(const CMat& a, const CMat& b) {
  return (a.conjugate().array() * b.array()).sum().real();
}

struct FwResult {
  CMat sigma;
  double value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  conic::Status status = conic::Status::optimal;
  std::vector<double> history;
};

inline FwResult frank_wolfe(const ValueGrad& fg, int n, const Dims& dims,
                            const std::vector<int>& transpose, FeasibleSet set,
                            const FwConfig& cfg, const std::vector<CMat>& starts) {
  FwResult out;
  CMat sigma = qcore::maximally_mixed(n);
  double f = 0.0;
  CMat g;
  if (!fg(sigma, f, &g)) throw std::runtime_error("frank_wolfe: objective infinite at start");
  for (const auto& c : starts) {
    double fc;
    CMat gc;
    if (c.rows() == n && fg(c, fc, &gc) && fc < f) {
      sigma = c;
      f = fc;
      g = gc;
    }
  }
  std::vector<CMat> atoms{sigma};
  std::vector<double> w{1.0};
  out.history.push_back(f);
  out.gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iterations; ++it) {
    out.iterations = it + 1;
    conic::Status st;
    const CMat s = linear_oracle(g, dims, transpose, set, cfg.sdp_tol, st);
    if (st != conic::Status::optimal) {
      out.status = st;
      break;
    }
    const double fw_gap = re_inner(g, CMat(sigma - s));
    out.gap = std::max(0.0, fw_gap);
    if (fw_gap <= cfg.tol) {
      out.converged = true;
      break;
    }
    CMat dir;
    double gmax = 1.0;
    int away = -1;
    if (cfg.away_steps && atoms.size() > 1) {
      double best = -std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < atoms.size(); ++k) {
        const double v = re_inner(g, atoms[k]);
        if (v > best) {
          best = v;
          away = static_cast<int>(k);
        }
      }
      const double away_gap = best - re_inner(g, sigma);
      if (away_gap > fw_gap && w[away] < 1.0) {
        dir = sigma - atoms[away];
        gmax = w[away] / (1.0 - w[away]);
      } else {
        away = -1;
      }
    }
    if (away < 0) dir = s - sigma;
    const double slope = re_inner(g, dir);
    double gamma = gmax, fn = 0.0;
    CMat gn;
    bool accepted = false;
    for (int h = 0; h < 60; ++h, gamma *= 0.5) {
      const CMat trial = sigma + gamma * dir;
      if (fg(trial, fn, &gn) && fn <= f + cfg.armijo * gamma * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // no decrease representable at double precision
      out.converged = out.gap <= cfg.tol;
      break;
    }
    if (away < 0) {
      for (auto& x : w) x *= (1.0 - gamma);
      int same = -1;
      for (size_t k = 0; k < atoms.size(); ++k) {
        if ((atoms[k] - s).cwiseAbs().maxCoeff() <= 1e-12) same = static_cast<int>(k);
      }
      if (gamma >= 1.0) {
        atoms = {s};
        w = {1.0};
      } else if (same >= 0) {
        w[same] += gamma;
      } else {
        atoms.push_back(s);
        w.push_back(gamma);
      }
    } else {
      for (auto& x : w) x *= (1.0 + gamma);
      w[away] -= gamma;
      if (w[away] <= 1e-15) {
        atoms.erase(atoms.begin() + away);
        w.erase(w.begin() + away);
      }
    }
    sigma = sigma + gamma * dir;
    f = fn;
    g = gn;
    // pairwise corrections over the active atoms, no oracle calls
    for (int inner = 0; inner < cfg.inner_iterations && atoms.size() > 1; ++inner) {
      int lo = 0, hi = 0;
      double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
      for (size_t k = 0; k < atoms.size(); ++k) {
        const double v = re_inner(g, atoms[k]);
        if (v < vlo) {
          vlo = v;
          lo = static_cast<int>(k);
        }
        if (v > vhi) {
          vhi = v;
          hi = static_cast<int>(k);
        }
      }
      if (lo == hi || vhi - vlo <= 0.1 * cfg.tol) break;
      const CMat pd = atoms[lo] - atoms[hi];
      const double pslope = re_inner(g, pd);
      double t = w[hi], ft = 0.0;
      CMat gt;
      bool ok = false;
      for (int h = 0; h < 40; ++h, t *= 0.5) {
        if (fg(CMat(sigma + t * pd), ft, &gt) && ft <= f + cfg.armijo * t * pslope) {
          ok = true;
          break;
        }
      }
      if (!ok) break;
      w[lo] += t;
      w[hi] -= t;
      sigma = sigma + t * pd;
      f = ft;
      g = gt;
      if (w[hi] <= 1e-15) {
        atoms.erase(atoms.begin() + hi);
        w.erase(w.begin() + hi);
      }
    }
    out.history.push_back(f);
  }
  out.sigma = sigma;
  out.value = f;
  return out;
}

/** D(ρ‖σ) in bits and its Daleckii–Krein gradient −Dlog₂(σ)[ρ]. */
inline bool relative_entropy_value_grad(const CMat& rho, double s_rho, const CMat& sigma,
                                        double& f, CMat* grad) {
  Eigen::SelfAdjointEigenSolver<CMat> es(qcore::hermitian_part(sigma));
  const RVec& lam = es.eigenvalues();
  const CMat& u = es.eigenvectors();
  const long n = lam.size();
  const double top = std::max(lam.maxCoeff(), 0.0);
  if (top <= 0.0) return false;
  const double cut = 1e-14 * top;
  const CMat rt = u.adjoint() * rho * u;
  double cross = 0.0;
  for (long i = 0; i < n; ++i) {
    if (lam(i) <= cut) {
      if (std::abs(rt(i, i)) > 1e-12) return false;
      continue;
    }
    cross += rt(i, i).real() * std::log2(lam(i));
  }
  f = -s_rho - cross;
  if (grad) {
    CMat gt = CMat::Zero(n, n);
    for (long i = 0; i < n; ++i) {
      if (lam(i) <= cut) continue;
      for (long j = 0; j < n; ++j) {
        if (lam(j) <= cut) continue;
        const double d = lam(i) - lam(j);
        const double l = std::abs(d) > 1e-12 * std::max(lam(i), lam(j))
                             ? (std::log(lam(i)) - std::log(lam(j))) / d
                             : 1.0 / lam(i);
        gt(i, j) = -rt(i, j) * l / std::log(2.0);
      }
    }
    *grad = qcore::hermitian_part(u * gt * u.adjoint());
  }
  return true;
}

inline BoundReport fw_report(const std::string& name, const FwResult& r) {
  BoundReport b;
  b.name = name;
  b.kind = BoundKind::fw_upper_estimate;
  b.value_bits = r.value;
  b.linear_value = r.value;
  b.gap = r.gap;
  b.status = r.status;
  b.iterations = r.iterations;
  b.converged = r.converged;
  b.trace = r.history;
  b.certificates["sigma"] = r.sigma;
  return b;
}

}  // namespace detail

namespace detail {

/**
 * Feasible starts from the relaxed SDPs: T_B(C − D)/W for PPT′ (D_max ≤
 * log₂ W) and G/μ for PPT states (D_max ≤ log₂ μ).
 */
inline std::vector<CMat> fw_starts(const CMat& rho, const Dims& dims, const BipartiteCut& cut,
                                   FeasibleSet set, const FwConfig& cfg) {
  std::vector<CMat> out = cfg.start_candidates;
  if (!cfg.sdp_start) return out;
  StateSdpOptions o;
  o.tol = cfg.sdp_tol;
  if (set == FeasibleSet::ppt_prime) {
    using namespace conic;
    const int n = static_cast<int>(rho.rows());
    ConicProgram p;
    const int c = p.add_variable("C", n);
    const int d = p.add_variable("D", n);
    const LinearMap pt = partial_transpose_map(dims, cut.right);
    p.add_constraint("dominate", {{c, pt}, {d, scale(pt, -1.0)}}, Relation::psd, rho);
    const CMat eye = CMat::Identity(n, n);
    p.set_linear_objective(Sense::minimize, {{c, eye}, {d, eye}});
    const ConicSolution sol = solve(p, cfg.sdp_tol);
    if (sol.optimal() && sol.primal_value > 0.0) {
      CMat sigma = qcore::partial_transpose(CMat(sol.value("C") - sol.value("D")), dims, cut.right);
      // ‖T_B σ‖₁ ≤ Tr(C + D) = W up to solver tolerance
      const double norm = qcore::trace_norm(CMat(sol.value("C") - sol.value("D")));
      out.push_back(qcore::hermitian_part(sigma) / std::max(norm, sol.primal_value));
    }
  } else {
    const BoundReport e = e_max_ppt(rho, dims, cut, o);
    if (e.status == conic::Status::optimal && e.linear_value > 0.0) {
      const CMat& gm = e.certificates.at("G");
      out.push_back(qcore::hermitian_part(gm) / gm.trace().real());
    }
  }
  return out;
}

}  // namespace detail

inline BoundReport fw_relative_entropy(const CMat& rho, const Dims& dims, const BipartiteCut& cut,
                                       FeasibleSet set, const FwConfig& cfg) {
  cut.validate(static_cast<int>(dims.size()));
  const CMat r = qcore::hermitian_part(rho);
  const double s_rho = qcore::von_neumann_entropy(r);
  auto fg = [&](const CMat& s, double& f, CMat* g) {
    return detail::relative_entropy_value_grad(r, s_rho, s, f, g);
  };
  const auto res = detail::frank_wolfe(fg, static_cast<int>(r.rows()), dims, cut.right, set, cfg,
                                       detail::fw_starts(r, dims, cut, set, cfg));
  return detail::fw_report(set == FeasibleSet::ppt_prime ? "R(state)" : "E(PPT)", res);
}

/** min over PPT′ of D(ρ‖σ). */
inline BoundReport rains_relative_entropy(const CMat& rho, const Dims& dims,
                                          const BipartiteCut& cut, const FwConfig& cfg = {}) {
  return fw_relative_entropy(rho, dims, cut, FeasibleSet::ppt_prime, cfg);
}

/** min over PPT states of D(ρ‖σ); a relaxation of the separable minimum. */
inline BoundReport relative_entropy_of_entanglement_ppt(const CMat& rho, const Dims& dims,
                                                        const BipartiteCut& cut,
                                                        const FwConfig& cfg = {}) {
  BoundReport r = fw_relative_entropy(rho, dims, cut, FeasibleSet::ppt_states, cfg);
  r.kind = BoundKind::fw_upper_estimate;
  return r;
}

namespace detail {

/**
 * D̃_α(ρ‖σ) in bits and its gradient in σ. With S = σ^γ, γ = (1−α)/2α and
 * Q = SρS the derivative of Tr Q^α is α Tr(M dS), M = ρSQ^{α−1} + Q^{α−1}Sρ,
 * and dS follows from the divided differences of x^γ.
 */
inline bool sandwiched_value_grad(const CMat& rho, double alpha, const CMat& sigma, double& f,
                                  CMat* grad) {
  Eigen::SelfAdjointEigenSolver<CMat> es(qcore::hermitian_part(sigma));
  const RVec& lam = es.eigenvalues();
  const CMat& u = es.eigenvectors();
  const long n = lam.size();
  const double top = std::max(lam.maxCoeff(), 0.0);
  if (top <= 0.0) return false;
  const double cut = 1e-14 * top;
  const double gam = (1.0 - alpha) / (2.0 * alpha);
  const CMat rt = u.adjoint() * rho * u;
  RVec sp = RVec::Zero(n);
  for (long i = 0; i < n; ++i) {
    if (lam(i) <= cut) {
      if (std::abs(rt(i, i)) > 1e-12) return false;
      continue;
    }
    sp(i) = std::pow(lam(i), gam);
  }
  // work in the eigenbasis of σ throughout
  const CMat qt = qcore::hermitian_part(CMat(sp.asDiagonal() * rt * sp.asDiagonal()));
  Eigen::SelfAdjointEigenSolver<CMat> eq(qt);
  const RVec q = eq.eigenvalues().cwiseMax(0.0);
  const double tr = q.array().pow(alpha).sum();
  if (!(tr > 0.0)) return false;
  f = std::log2(tr) / (alpha - 1.0);
  if (grad) {
    const CMat qa = eq.eigenvectors() * q.array().pow(alpha - 1.0).matrix().asDiagonal() *
                    eq.eigenvectors().adjoint();
    const CMat m = rt * sp.asDiagonal() * qa + qa * sp.asDiagonal() * rt;
    CMat gt = CMat::Zero(n, n);
    for (long i = 0; i < n; ++i) {
      if (lam(i) <= cut) continue;
      for (long j = 0; j < n; ++j) {
        if (lam(j) <= cut) continue;
        const double d = lam(i) - lam(j);
        const double l = std::abs(d) > 1e-12 * std::max(lam(i), lam(j))
                             ? (sp(i) - sp(j)) / d
                             : gam * std::pow(lam(i), gam - 1.0);
        gt(i, j) = m(i, j) * l;
      }
    }
    *grad = qcore::hermitian_part(CMat(u * gt * u.adjoint())) *
            (alpha / ((alpha - 1.0) * std::log(2.0) * tr));
  }
  return true;
}

}  // namespace detail

/** min over PPT′ of D̃_α(ρ‖σ). */
inline BoundReport sandwiched_rains(const CMat& rho, const Dims& dims, const BipartiteCut& cut,
                                    double alpha, const FwConfig& cfg = {}) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw std::out_of_range("sandwiched_rains: alpha must lie in (1, 2]");
  }
  cut.validate(static_cast<int>(dims.size()));
  const CMat r = qcore::hermitian_part(rho);
  const int n = static_cast<int>(r.rows());
  auto fg = [&](const CMat& s, double& f, CMat* g) {
    return detail::sandwiched_value_grad(r, alpha, s, f, g);
  };
  const auto res = detail::frank_wolfe(fg, n, dims, cut.right, FeasibleSet::ppt_prime, cfg,
                                       detail::fw_starts(r, dims, cut, FeasibleSet::ppt_prime, cfg));
  return detail::fw_report("R_alpha(state)", res);
}

// ---- bidirectional E_max lower bound ----

struct EmaxConfig {
  int restarts = 20;
  int steps = 50;
  std::uint64_t seed = 1;
  double sdp_tol = 1e-8;
  /** Stop a restart once the relative improvement of μ falls below this. */
  double improve_tol = 1e-9;
  /**
   * Restrict S_A A′ inputs to Σ_x c_x |x⟩|x⟩ when the channel has the
   * register phase symmetry.
   */
  bool register_inputs = true;
};

namespace detail {

/** Top eigenvector of H, optionally restricted to the span of given columns. */
inline CVec top_eigenvector(const CMat& h, const CMat* basis) {
  if (basis) {
    const CMat c = basis->adjoint() * h * *basis;
    Eigen::SelfAdjointEigenSolver<CMat> es(qcore::hermitian_part(c));
    return *basis * es.eigenvectors().col(es.eigenvalues().size() - 1);
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(qcore::hermitian_part(h));
  return es.eigenvectors().col(es.eigenvalues().size() - 1);
}

}  // namespace detail

/**
 * Heuristic lower bound on the PPT-relaxed E²→²_max: maximize μ(N(ψ ⊗ φ))
 * over pure product inputs by alternating maximization of the linearization
 * ⟨Y, N(ψψ† ⊗ φφ†)⟩, where Y is the SDP multiplier (∂μ/∂ρ). Since μ is convex
 * in ρ every accepted step is an ascent step.
 */
inline BoundReport e_max_bidirectional_lower(const channels::BidirectionalChannel& n,
                                             const EmaxConfig& cfg = {}) {
  const int dsa = n.d_ap, dsb = n.d_bp;
  const Dims out_dims{dsa, n.d_a, n.d_b, dsb};
  const BipartiteCut cut = BipartiteCut::split(2, 4);
  const channels::KrausList kraus = channels::bidirectional_kraus(n);
  channels::KrausList adj;
  for (const auto& k : kraus) adj.push_back(k.adjoint());
  const bool restrict = cfg.register_inputs && has_register_symmetry(n.J, n.d_ap, n.d_a);
  CMat diag_basis;
  if (restrict) {
    diag_basis = CMat::Zero(dsa * n.d_ap, dsa);
    for (int x = 0; x < dsa; ++x) diag_basis(x * n.d_ap + x, x) = 1.0;
  }
  StateSdpOptions sopt;
  sopt.tol = cfg.sdp_tol;
  if (restrict) sopt.pattern = register_pattern(dsa, n.d_a, n.d_b * dsb);

  auto evaluate = [&](const CVec& psi, const CVec& phi, CMat* grad) {
    const CMat in = qcore::kron(qcore::projector(psi), qcore::projector(phi));
    const CMat out = channels::apply_kraus_on(kraus, in, {dsa, n.d_ap, n.d_bp, dsb}, {1, 2},
                                              {n.d_a, n.d_b});
    BoundReport r = e_max_ppt(out, out_dims, cut, sopt);
    if (grad && r.certificates.count("gradient")) *grad = r.certificates["gradient"];
    return r;
  };

  BoundReport best;
  best.name = "E2to2_max(lower)";
  best.kind = BoundKind::heuristic_lower;
  best.value_bits = -std::numeric_limits<double>::infinity();
  best.linear_value = 0.0;
  for (int r = 0; r < cfg.restarts; ++r) {
    random::Rng local(random::derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    CVec psi = restrict ? CVec(diag_basis * random::haar_state(dsa, local))
                        : random::haar_state(static_cast<long>(dsa) * n.d_ap, local);
    CVec phi = random::haar_state(static_cast<long>(n.d_bp) * dsb, local);
    CMat y;
    BoundReport cur = evaluate(psi, phi, &y);
    int steps = 0;
    for (; steps < cfg.steps && cur.status == conic::Status::optimal; ++steps) {
      // Z = N†(Y) on S_A A′ B′ S_B
      const CMat z = channels::apply_kraus_on(adj, y, out_dims, {1, 2}, {n.d_ap, n.d_bp});
      const long da = static_cast<long>(dsa) * n.d_ap, db = static_cast<long>(n.d_bp) * dsb;
      const CMat pphi = qcore::kron(CMat::Identity(da, da), CMat(phi));
      const CVec psi_new = detail::top_eigenvector(pphi.adjoint() * z * pphi,
                                                   restrict ? &diag_basis : nullptr);
      const CMat ppsi = qcore::kron(CMat(psi_new), CMat::Identity(db, db));
      const CVec phi_new = detail::top_eigenvector(ppsi.adjoint() * z * ppsi, nullptr);
      CMat y_new;
      BoundReport next = evaluate(psi_new, phi_new, &y_new);
      if (next.status != conic::Status::optimal ||
          next.linear_value <= cur.linear_value * (1.0 + cfg.improve_tol)) {
        if (next.status == conic::Status::optimal && next.linear_value > cur.linear_value) {
          cur = next;
        }
        break;
      }
      psi = psi_new;
      phi = phi_new;
      y = y_new;
      cur = next;
    }
    best.iterations += steps;
    if (cur.status == conic::Status::optimal && cur.value_bits > best.value_bits) {
      best.value_bits = cur.value_bits;
      best.linear_value = cur.linear_value;
      best.gap = cur.gap;
      best.status = cur.status;
      best.certificates["psi"] = psi;
      best.certificates["phi"] = phi;
    }
    best.trace.push_back(cur.status == conic::Status::optimal
                             ? cur.value_bits
                             : -std::numeric_limits<double>::infinity());
  }
  best.converged = std::isfinite(best.value_bits);
  if (!best.converged) best.status = conic::Status::numerical_failure;
  return best;
}

// ---- amortization ----

struct AmortizationReport {
  double r_bidirectional = 0.0;
  int trials = 0;
  int passed = 0;
  int violated = 0;
  int skipped = 0;
  /** max over trials of (R_out − R_in) − R²→²_max. */
  double worst_slack = -std::numeric_limits<double>::infinity();
  std::vector<double> differences;
  std::uint64_t seed = 0;

  bool holds() const { return violated == 0 && passed > 0; }
};

/** R_max(L_A A; B L_B)_ω − R_max(L_A A′; B′ L_B)_ρ for ω = N(ρ). */
inline std::optional<double> amortization_difference(const channels::BidirectionalChannel& n,
                                                     const CMat& rho, int d_la, int d_lb,
                                                     double tol = 1e-9) {
  const BipartiteCut cut = BipartiteCut::split(2, 4);
  const CMat omega = channels::apply_bidirectional(n, rho, d_la, d_lb);
  StateSdpOptions o;
  o.tol = tol;
  const BoundReport in = w_state(rho, {d_la, n.d_ap, n.d_bp, d_lb}, cut, o);
  const BoundReport out = w_state(omega, {d_la, n.d_a, n.d_b, d_lb}, cut, o);
  if (in.status != conic::Status::optimal || out.status != conic::Status::optimal) {
    return std::nullopt;
  }
  return out.value_bits - in.value_bits;
}

inline AmortizationReport amortization_check_rains(const channels::BidirectionalChannel& n,
                                                   int trials, std::uint64_t seed = 1,
                                                   int d_la = 2, int d_lb = 2,
                                                   double slack = 1e-6) {
  AmortizationReport rep;
  rep.seed = seed;
  rep.trials = trials;
  const BoundReport g = gamma_bidirectional(n);
  rep.r_bidirectional = g.value_bits;
  const long dim = static_cast<long>(d_la) * n.d_ap * n.d_bp * d_lb;
  for (int t = 0; t < trials; ++t) {
    random::Rng rng(random::derive_seed(seed, static_cast<std::uint64_t>(t)));
    const CMat rho = random::random_density(dim, dim, rng);
    const auto d = amortization_difference(n, rho, d_la, d_lb);
    if (!d) {
      ++rep.skipped;
      continue;
    }
    rep.differences.push_back(*d);
    rep.worst_slack = std::max(rep.worst_slack, *d - rep.r_bidirectional);
    if (*d <= rep.r_bidirectional + slack) {
      ++rep.passed;
    } else {
      ++rep.violated;
    }
  }
  return rep;
}

}  // namespace biqap::measures

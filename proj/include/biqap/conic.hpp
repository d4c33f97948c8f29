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

#include <Eigen/Sparse>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "biqap/qcore.hpp"

namespace biqap::conic {

enum class Cone { psd, free };
enum class Relation { equal, psd };  // L(X) = B  or  L(X) ⪰ B
enum class Sense { minimize, maximize };
enum class Status { optimal, infeasible, unbounded, numerical_failure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
    case Status::numerical_failure:
      return "numerical-failure";
  }
  return "unknown";
}

/** Index groups; entries outside the groups are structurally zero. */
using Pattern = std::vector<std::vector<int>>;

/** A linear map on Hermitian matrices given by a closure. */
struct LinearMap {
  int in_dim = 0;
  int out_dim = 0;
  std::function<CMat(const CMat&)> apply;

  CMat operator()(const CMat& x) const { return apply(x); }
};

inline LinearMap identity_map(int n) {
  return {n, n, [](const CMat& x) { return x; }};
}

inline LinearMap scale(const LinearMap& f, double s) {
  return {f.in_dim, f.out_dim, [f, s](const CMat& x) { return CMat(s * f(x)); }};
}

inline LinearMap compose(const LinearMap& outer, const LinearMap& inner) {
  if (outer.in_dim != inner.out_dim) {
    throw std::invalid_argument("compose: dimension mismatch");
  }
  return {inner.in_dim, outer.out_dim,
          [outer, inner](const CMat& x) { return outer(inner(x)); }};
}

inline LinearMap partial_trace_map(const Dims& dims, const std::vector<int>& keep) {
  long out = 1;
  for (int k : keep) out *= dims[k];
  return {static_cast<int>(qcore::dim_product(dims)), static_cast<int>(out),
          [dims, keep](const CMat& x) { return qcore::partial_trace(x, dims, keep); }};
}

inline LinearMap partial_transpose_map(const Dims& dims,
                                       const std::vector<int>& subs) {
  const int n = static_cast<int>(qcore::dim_product(dims));
  return {n, n, [dims, subs](const CMat& x) {
            return qcore::partial_transpose(x, dims, subs);
          }};
}

/** X ↦ [Tr X] as a 1×1 matrix. */
inline LinearMap trace_map(int n) {
  return {n, 1, [](const CMat& x) {
            CMat t(1, 1);
            t(0, 0) = x.trace();
            return t;
          }};
}

/** X ↦ [Tr(H X)] for Hermitian H. */
inline LinearMap inner_product_map(const CMat& h) {
  return {static_cast<int>(h.rows()), 1, [h](const CMat& x) {
            CMat t(1, 1);
            t(0, 0) = (h.array() * x.transpose().array()).sum();
            return t;
          }};
}

/** Scalar x (1×1) ↦ x·H. */
inline LinearMap scalar_times(const CMat& h) {
  return {1, static_cast<int>(h.rows()),
          [h](const CMat& x) { return CMat(x(0, 0) * h); }};
}

/** X ↦ X ⊗ I_m followed by a subsystem permutation of the result. */
inline LinearMap tensor_identity_map(const Dims& x_dims, const Dims& id_dims,
                                     const std::vector<int>& perm) {
  Dims all = x_dims;
  all.insert(all.end(), id_dims.begin(), id_dims.end());
  const long m = qcore::dim_product(id_dims);
  const int n = static_cast<int>(qcore::dim_product(x_dims));
  return {n, static_cast<int>(n * m), [all, m, perm](const CMat& x) {
            CMat big = qcore::kron(x, CMat::Identity(m, m));
            if (perm.empty()) return big;
            return qcore::permute_subsystems(big, all, perm);
          }};
}

inline LinearMap conjugation_map(const CMat& k) {
  return {static_cast<int>(k.cols()), static_cast<int>(k.rows()),
          [k](const CMat& x) { return CMat(k * x * k.adjoint()); }};
}

inline LinearMap sum_maps(const LinearMap& f, const LinearMap& g) {
  if (f.in_dim != g.in_dim || f.out_dim != g.out_dim) {
    throw std::invalid_argument("sum_maps: dimension mismatch");
  }
  return {f.in_dim, f.out_dim, [f, g](const CMat& x) { return CMat(f(x) + g(x)); }};
}

struct Variable {
  std::string name;
  int n = 0;
  Cone cone = Cone::psd;
  Pattern pattern;
};

struct Term {
  int var = 0;
  LinearMap map;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::equal;
  CMat rhs;
  Pattern pattern;
};

struct LinearObjectiveTerm {
  int var = 0;
  CMat c;  // contributes Re Tr(c X)
};

/** ‖Σ L_k(X_k) + offset‖_∞ */
struct NormObjective {
  std::vector<Term> terms;
  CMat offset;
  bool psd_argument = true;
  Pattern pattern;
};

struct Objective {
  Sense sense = Sense::minimize;
  std::vector<LinearObjectiveTerm> linear;
  double constant = 0.0;
  std::optional<NormObjective> norm;
};

/** Complex Hermitian conic program over PSD and free variables. */
class ConicProgram {
 public:
  int add_variable(const std::string& name, int n, Cone cone = Cone::psd,
                   Pattern pattern = {}) {
    if (n < 1) throw std::invalid_argument("add_variable: size must be >= 1");
    check_pattern(pattern, n);
    for (const auto& v : vars_) {
      if (v.name == name) throw std::invalid_argument("duplicate variable " + name);
    }
    vars_.push_back({name, n, cone, std::move(pattern)});
    return static_cast<int>(vars_.size()) - 1;
  }

  void add_constraint(const std::string& name, std::vector<Term> terms,
                      Relation rel, const CMat& rhs, Pattern pattern = {}) {
    if (terms.empty()) throw std::invalid_argument("constraint without terms");
    const int out = terms.front().map.out_dim;
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= static_cast<int>(vars_.size())) {
        throw std::out_of_range("constraint references unknown variable");
      }
      if (t.map.in_dim != vars_[t.var].n || t.map.out_dim != out) {
        throw std::invalid_argument("constraint " + name + ": dimension mismatch");
      }
    }
    if (rhs.rows() != out || rhs.cols() != out) {
      throw std::invalid_argument("constraint " + name + ": rhs shape mismatch");
    }
    if ((rhs - rhs.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("constraint " + name + ": rhs not Hermitian");
    }
    check_pattern(pattern, out);
    cons_.push_back({name, std::move(terms), rel, qcore::hermitian_part(rhs),
                     std::move(pattern)});
  }

  void set_linear_objective(Sense sense, std::vector<LinearObjectiveTerm> terms,
                            double constant = 0.0) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= static_cast<int>(vars_.size()) ||
          t.c.rows() != vars_[t.var].n || t.c.cols() != vars_[t.var].n) {
        throw std::invalid_argument("objective term dimension mismatch");
      }
    }
    obj_ = Objective{sense, std::move(terms), constant, std::nullopt};
  }

  /** Minimize ‖Σ L_k(X_k) + offset‖_∞. */
  void set_norm_objective(std::vector<Term> terms, const CMat& offset,
                          bool psd_argument = true, Pattern pattern = {}) {
    if (terms.empty()) throw std::invalid_argument("norm objective without terms");
    const int out = terms.front().map.out_dim;
    for (const auto& t : terms) {
      if (t.map.in_dim != vars_.at(t.var).n || t.map.out_dim != out) {
        throw std::invalid_argument("norm objective dimension mismatch");
      }
    }
    CMat off = offset.size() == 0 ? CMat::Zero(out, out) : offset;
    obj_ = Objective{Sense::minimize, {}, 0.0,
                     NormObjective{std::move(terms), off, psd_argument, std::move(pattern)}};
  }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  const Objective& objective() const { return obj_; }

  int variable_index(const std::string& name) const {
    for (size_t k = 0; k < vars_.size(); ++k) {
      if (vars_[k].name == name) return static_cast<int>(k);
    }
    return -1;
  }

 private:
  static void check_pattern(const Pattern& p, int n) {
    std::vector<bool> seen(n, false);
    for (const auto& g : p) {
      for (int i : g) {
        if (i < 0 || i >= n || seen[i]) {
          throw std::invalid_argument("invalid block pattern");
        }
        seen[i] = true;
      }
    }
  }

  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  Objective obj_;
};

/**
 * Rewrites a spectral-norm objective ‖M‖_∞ into min t with tI − M ⪰ 0
 * (and tI + M ⪰ 0 when M is not known to be PSD).
 */
inline ConicProgram spectral_norm_objective_rewrite(const ConicProgram& prog) {
  if (!prog.objective().norm) return prog;
  ConicProgram out;
  for (const auto& v : prog.variables()) {
    out.add_variable(v.name, v.n, v.cone, v.pattern);
  }
  for (const auto& c : prog.constraints()) {
    out.add_constraint(c.name, c.terms, c.relation, c.rhs, c.pattern);
  }
  const NormObjective& no = *prog.objective().norm;
  const int m = no.terms.front().map.out_dim;
  std::string tname = "t";
  while (out.variable_index(tname) >= 0) tname += "_";
  const int t = out.add_variable(tname, 1, Cone::free);
  const CMat eye = CMat::Identity(m, m);
  // tI − M − offset ⪰ 0
  std::vector<Term> upper{{t, scalar_times(eye)}};
  for (const auto& term : no.terms) upper.push_back({term.var, scale(term.map, -1.0)});
  out.add_constraint("norm_upper", upper, Relation::psd, no.offset, no.pattern);
  if (!no.psd_argument) {
    std::vector<Term> lower{{t, scalar_times(eye)}};
    for (const auto& term : no.terms) lower.push_back(term);
    out.add_constraint("norm_lower", lower, Relation::psd, CMat(-no.offset), no.pattern);
  }
  CMat one = CMat::Ones(1, 1);
  out.set_linear_objective(Sense::minimize, {{t, one}});
  return out;
}

// ---------------------------------------------------------------------------
// Real standard form
//   (P) min ⟨C,X⟩ + c_fᵀ x_f  s.t.  𝒜(X) + F x_f = b,  X ⪰ 0 (block diagonal)
//   (D) max bᵀy  s.t.  𝒜*(y) + Z = C,  Fᵀy = c_f,  Z ⪰ 0
// ---------------------------------------------------------------------------

struct Entry {
  int r;
  int c;
  double v;
};

struct RowBlock {
  int block;
  std::vector<Entry> entries;  // full symmetric storage
};

struct Row {
  std::vector<RowBlock> blocks;
  std::vector<std::pair<int, double>> free;
};

struct RealProgram {
  std::vector<int> block_sizes;
  int num_free = 0;
  std::vector<Row> rows;
  RVec b;
  std::vector<RMat> c;  // per block
  RVec c_free;

  int num_rows() const { return static_cast<int>(rows.size()); }
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iterations = 200;
  bool verbose = false;
  /** Solve real programs without the complex embedding. */
  bool real_field = false;
};

struct IpmResult {
  Status status = Status::numerical_failure;
  std::vector<RMat> x;
  std::vector<RMat> z;
  RVec y;
  RVec x_free;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

namespace detail {

struct BlockRowRef {
  int row;
  const std::vector<Entry>* entries;
  std::vector<int> distinct_rows;
};

inline double frob(const std::vector<RMat>& ms) {
  double s = 0.0;
  for (const auto& m : ms) s += m.squaredNorm();
  return std::sqrt(s);
}

inline double inner(const std::vector<RMat>& a, const std::vector<RMat>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

/** Largest α ≤ ∞ with X + α dX ⪰ 0, for X ≻ 0. */
inline double max_step(const RMat& x, const RMat& dx) {
  Eigen::LLT<RMat> llt(x);
  double lmin;
  if (llt.info() == Eigen::Success) {
    RMat w = llt.matrixL().solve(dx);
    w = llt.matrixL().solve(w.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<RMat> es((w + w.transpose()) / 2.0,
                                           Eigen::EigenvaluesOnly);
    lmin = es.eigenvalues()(0);
  } else {
    Eigen::GeneralizedSelfAdjointEigenSolver<RMat> es(
        (dx + dx.transpose()) / 2.0, x + 1e-14 * RMat::Identity(x.rows(), x.cols()),
        Eigen::EigenvaluesOnly);
    lmin = es.eigenvalues()(0);
  }
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

class Ipm {
 public:
  Ipm(const RealProgram& p, const SolverOptions& opt) : p_(p), opt_(opt) {
    nb_ = static_cast<int>(p.block_sizes.size());
    m_ = p.num_rows();
    nf_ = p.num_free;
    block_rows_.resize(nb_);
    f_ = RMat::Zero(m_, nf_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& rb : p.rows[i].blocks) {
        BlockRowRef ref{i, &rb.entries, {}};
        for (const auto& e : rb.entries) ref.distinct_rows.push_back(e.r);
        std::sort(ref.distinct_rows.begin(), ref.distinct_rows.end());
        ref.distinct_rows.erase(
            std::unique(ref.distinct_rows.begin(), ref.distinct_rows.end()),
            ref.distinct_rows.end());
        block_rows_[rb.block].push_back(std::move(ref));
      }
      for (const auto& [j, v] : p.rows[i].free) f_(i, j) += v;
    }
  }

  IpmResult run() {
    IpmResult res;
    init();
    const double bnorm = p_.b.norm();
    double cnorm = std::sqrt(frob(p_.c) * frob(p_.c) + p_.c_free.squaredNorm());
    int total_n = 0;
    for (int n : p_.block_sizes) total_n += n;
    std::vector<RMat> rd(nb_);
    RVec rp, rf;
    double best_merit = std::numeric_limits<double>::infinity();
    IpmResult best;
    int stall = 0;
    for (int it = 0; it <= opt_.max_iterations; ++it) {
      // residuals
      rp = p_.b - apply_a(x_) - f_ * xf_;
      std::vector<RMat> aty = apply_at(y_);
      for (int k = 0; k < nb_; ++k) rd[k] = p_.c[k] - z_[k] - aty[k];
      rf = p_.c_free - f_.transpose() * y_;
      const double pobj = inner(p_.c, x_) + p_.c_free.dot(xf_);
      const double dobj = p_.b.dot(y_);
      const double pinf = rp.norm() / (1.0 + bnorm);
      const double dinf = std::sqrt(frob(rd) * frob(rd) + rf.squaredNorm()) / (1.0 + cnorm);
      const double gap = std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj));
      const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      const double mu = total_n > 0 ? inner(x_, z_) / total_n : 0.0;
      if (opt_.verbose) {
        std::fprintf(stderr, "ipm %3d p=% .10e d=% .10e pinf=%.2e dinf=%.2e gap=%.2e mu=%.2e\n",
                     it, pobj, dobj, pinf, dinf, gap, mu);
      }
      fill(res, pobj, dobj, pinf, dinf, gap, it);
      const double merit = std::max({pinf, dinf, relgap});
      if (merit < best_merit) {
        best_merit = merit;
        best = res;
        stall = 0;
      } else {
        ++stall;
      }
      if (pinf <= opt_.tol && dinf <= opt_.tol && gap <= opt_.tol) {
        res.status = Status::optimal;
        return res;
      }
      if (detect_infeasible(dobj)) {
        res.status = Status::infeasible;
        return res;
      }
      if (detect_unbounded(pobj)) {
        res.status = Status::unbounded;
        return res;
      }
      if (it == opt_.max_iterations || stall > 12) break;
      if (!step(rp, rd, rf, mu)) break;
    }
    best.status = Status::numerical_failure;
    return best;
  }

 private:
  void fill(IpmResult& r, double pobj, double dobj, double pinf, double dinf,
            double gap, int it) {
    r.x = x_;
    r.z = z_;
    r.y = y_;
    r.x_free = xf_;
    r.primal_objective = pobj;
    r.dual_objective = dobj;
    r.primal_infeasibility = pinf;
    r.dual_infeasibility = dinf;
    r.gap = gap;
    r.iterations = it;
  }

  void init() {
    x_.resize(nb_);
    z_.resize(nb_);
    std::vector<double> anorm(m_, 0.0);
    std::vector<std::vector<double>> anorm_b(nb_);
    for (int k = 0; k < nb_; ++k) {
      const int n = p_.block_sizes[k];
      double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
      double eta = std::max(xi, p_.c[k].norm());
      for (const auto& ref : block_rows_[k]) {
        double a = 0.0;
        for (const auto& e : *ref.entries) a += e.v * e.v;
        a = std::sqrt(a);
        xi = std::max(xi, n * (1.0 + std::abs(p_.b(ref.row))) / (1.0 + a));
        eta = std::max(eta, a);
      }
      eta = std::max(eta, std::sqrt(static_cast<double>(n)));
      x_[k] = xi * RMat::Identity(n, n);
      z_[k] = eta * RMat::Identity(n, n);
    }
    y_ = RVec::Zero(m_);
    xf_ = RVec::Zero(nf_);
  }

  RVec apply_a(const std::vector<RMat>& x) const {
    RVec out = RVec::Zero(m_);
    for (int k = 0; k < nb_; ++k) {
      for (const auto& ref : block_rows_[k]) {
        double s = 0.0;
        for (const auto& e : *ref.entries) s += e.v * x[k](e.r, e.c);
        out(ref.row) += s;
      }
    }
    return out;
  }

  std::vector<RMat> apply_at(const RVec& y) const {
    std::vector<RMat> out(nb_);
    for (int k = 0; k < nb_; ++k) {
      const int n = p_.block_sizes[k];
      out[k] = RMat::Zero(n, n);
      for (const auto& ref : block_rows_[k]) {
        const double yi = y(ref.row);
        if (yi == 0.0) continue;
        for (const auto& e : *ref.entries) out[k](e.r, e.c) += yi * e.v;
      }
    }
    return out;
  }

  /** Schur complement M_ij = Σ_k Tr(A_i X A_j Z⁻¹). */
  RMat schur(const std::vector<RMat>& zinv) const {
    RMat mm = RMat::Zero(m_, m_);
    for (int k = 0; k < nb_; ++k) {
      const auto& refs = block_rows_[k];
      const int n = p_.block_sizes[k];
      const RMat& x = x_[k];
      const RMat& zi = zinv[k];
      RMat t(n, n), g(n, n);
      for (size_t a = 0; a < refs.size(); ++a) {
        const auto& ri = refs[a];
        // G = Z⁻¹ A_i X using only the nonzero rows of A_i
        const int nr = static_cast<int>(ri.distinct_rows.size());
        RMat tr = RMat::Zero(nr, n);
        for (const auto& e : *ri.entries) {
          const int pos = static_cast<int>(
              std::lower_bound(ri.distinct_rows.begin(), ri.distinct_rows.end(), e.r) -
              ri.distinct_rows.begin());
          tr.row(pos) += e.v * x.row(e.c);
        }
        if (nr == n) {
          g.noalias() = zi * tr;
        } else {
          RMat zc(n, nr);
          for (int q = 0; q < nr; ++q) zc.col(q) = zi.col(ri.distinct_rows[q]);
          g.noalias() = zc * tr;
        }
        for (size_t b = a; b < refs.size(); ++b) {
          const auto& rj = refs[b];
          double s = 0.0;
          for (const auto& e : *rj.entries) s += e.v * g(e.c, e.r);
          mm(ri.row, rj.row) += s;
          if (b != a) mm(rj.row, ri.row) += s;
        }
      }
    }
    return mm;
  }

  struct Factor {
    Eigen::LLT<RMat> llt;
    Eigen::LDLT<RMat> ldlt;
    bool use_ldlt = false;
    RMat minv_f;
    Eigen::LDLT<RMat> sf;

    RVec solve_m(const RVec& r) const {
      return use_ldlt ? RVec(ldlt.solve(r)) : RVec(llt.solve(r));
    }
  };

  bool factor(RMat& mm, Factor& fac) const {
    const double dmax = std::max(mm.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    fac.llt.compute(mm);
    double reg = 1e-15 * dmax;
    int tries = 0;
    while (fac.llt.info() != Eigen::Success && tries < 8) {
      mm.diagonal().array() += reg;
      reg *= 100.0;
      fac.llt.compute(mm);
      ++tries;
    }
    if (fac.llt.info() != Eigen::Success) {
      fac.ldlt.compute(mm);
      if (fac.ldlt.info() != Eigen::Success) return false;
      fac.use_ldlt = true;
    }
    if (nf_ > 0) {
      fac.minv_f.resize(m_, nf_);
      for (int j = 0; j < nf_; ++j) fac.minv_f.col(j) = fac.solve_m(f_.col(j));
      RMat s = f_.transpose() * fac.minv_f;
      s = (s + s.transpose()) / 2.0;
      const double smax = std::max(s.diagonal().cwiseAbs().maxCoeff(), 1e-300);
      s.diagonal().array() += 1e-14 * smax;
      fac.sf.compute(s);
    }
    return true;
  }

  // [M F; Fᵀ 0][dy; dxf] = [h; rf]
  void solve_aug_once(const Factor& fac, const RVec& h, const RVec& rf, RVec& dy,
                      RVec& dxf) const {
    const RVec mh = fac.solve_m(h);
    if (nf_ > 0) {
      dxf = fac.sf.solve(RVec(f_.transpose() * mh - rf));
      dy = mh - fac.minv_f * dxf;
    } else {
      dxf = RVec::Zero(0);
      dy = mh;
    }
  }

  void solve_aug(const RMat& mm, const Factor& fac, const RVec& h, const RVec& rf, RVec& dy,
                 RVec& dxf) const {
    solve_aug_once(fac, h, rf, dy, dxf);
    for (int pass = 0; pass < 2; ++pass) {
      const RVec r1 = h - mm * dy - f_ * dxf;
      const RVec r2 = rf - f_.transpose() * dy;
      if (r1.norm() + r2.norm() <= 1e-15 * (h.norm() + rf.norm())) break;
      RVec ey, exf;
      solve_aug_once(fac, r1, r2, ey, exf);
      dy += ey;
      dxf += exf;
    }
  }

  bool step(const RVec& rp, const std::vector<RMat>& rd, const RVec& rf, double mu) {
    std::vector<RMat> zinv(nb_);
    for (int k = 0; k < nb_; ++k) {
      const int n = p_.block_sizes[k];
      Eigen::LLT<RMat> llt(z_[k]);
      if (llt.info() != Eigen::Success) return false;
      zinv[k] = llt.solve(RMat::Identity(n, n));
      zinv[k] = (zinv[k] + zinv[k].transpose()) / 2.0;
    }
    const RMat mm = schur(zinv);
    RMat mreg = mm;
    Factor fac;
    if (!factor(mreg, fac)) return false;

    // X Rd Z⁻¹ is shared by predictor and corrector
    std::vector<RMat> xrdz(nb_);
    for (int k = 0; k < nb_; ++k) xrdz[k] = x_[k] * rd[k] * zinv[k];

    auto direction = [&](double sigma, const std::vector<RMat>* corr,
                         std::vector<RMat>& dx, std::vector<RMat>& dz, RVec& dy,
                         RVec& dxf) {
      std::vector<RMat> g(nb_);
      for (int k = 0; k < nb_; ++k) {
        g[k] = sigma * mu * zinv[k] - x_[k] - xrdz[k];
        if (corr) g[k] -= (*corr)[k];
      }
      const RVec h = rp - apply_a_nonsym(g);
      solve_aug(mm, fac, h, rf, dy, dxf);
      const std::vector<RMat> aty = apply_at(dy);
      dx.resize(nb_);
      dz.resize(nb_);
      for (int k = 0; k < nb_; ++k) {
        dz[k] = rd[k] - aty[k];
        // σμZ⁻¹ − X − corr − X dZ Z⁻¹ = g + X 𝒜*(dy) Z⁻¹
        const RMat t = g[k] + x_[k] * aty[k] * zinv[k];
        dx[k] = (t + t.transpose()) / 2.0;
      }
    };

    std::vector<RMat> dxa, dza;
    RVec dya, dxfa;
    direction(0.0, nullptr, dxa, dza, dya, dxfa);
    double ap = 1.0, ad = 1.0;
    for (int k = 0; k < nb_; ++k) {
      ap = std::min(ap, max_step(x_[k], dxa[k]));
      ad = std::min(ad, max_step(z_[k], dza[k]));
    }
    int total_n = 0;
    for (int n : p_.block_sizes) total_n += n;
    double mu_aff = 0.0;
    for (int k = 0; k < nb_; ++k) {
      mu_aff += ((x_[k] + ap * dxa[k]).array() * (z_[k] + ad * dza[k]).array()).sum();
    }
    mu_aff /= total_n;
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    std::vector<RMat> corr(nb_);
    for (int k = 0; k < nb_; ++k) corr[k] = dxa[k] * dza[k] * zinv[k];
    std::vector<RMat> dx, dz;
    RVec dy, dxf;
    direction(sigma, &corr, dx, dz, dy, dxf);

    double apm = std::numeric_limits<double>::infinity();
    double adm = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb_; ++k) {
      apm = std::min(apm, max_step(x_[k], dx[k]));
      adm = std::min(adm, max_step(z_[k], dz[k]));
    }
    const double gamma = 0.9 + 0.09 * std::min({apm, adm, 1.0});
    const double alpha_p = std::min(1.0, gamma * apm);
    const double alpha_d = std::min(1.0, gamma * adm);
    if (!(alpha_p > 0.0) || !(alpha_d > 0.0)) return false;
    for (int k = 0; k < nb_; ++k) {
      x_[k] += alpha_p * dx[k];
      z_[k] += alpha_d * dz[k];
      x_[k] = (x_[k] + x_[k].transpose()) / 2.0;
      z_[k] = (z_[k] + z_[k].transpose()) / 2.0;
    }
    xf_ += alpha_p * dxf;
    y_ += alpha_d * dy;
    return std::isfinite(y_.sum()) && std::isfinite(xf_.sum());
  }

  RVec apply_a_nonsym(const std::vector<RMat>& g) const {
    RVec out = RVec::Zero(m_);
    for (int k = 0; k < nb_; ++k) {
      for (const auto& ref : block_rows_[k]) {
        double s = 0.0;
        for (const auto& e : *ref.entries) s += e.v * g[k](e.r, e.c);
        out(ref.row) += s;
      }
    }
    return out;
  }

  bool detect_infeasible(double dobj) const {
    if (!(dobj > 0.0)) return false;
    const std::vector<RMat> aty = apply_at(y_);
    double lmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb_; ++k) {
      Eigen::SelfAdjointEigenSolver<RMat> es(-aty[k], Eigen::EigenvaluesOnly);
      lmin = std::min(lmin, es.eigenvalues()(0));
    }
    if (nb_ == 0) lmin = 0.0;
    const double fty = nf_ > 0 ? (f_.transpose() * y_).norm() : 0.0;
    const double cert_tol = 1e-8;
    return lmin / dobj > -cert_tol && fty / dobj < cert_tol && y_.norm() > 1e6;
  }

  bool detect_unbounded(double pobj) const {
    if (!(pobj < 0.0)) return false;
    const RVec ax = apply_a(x_) + f_ * xf_;
    const double xnorm = frob(x_) + xf_.norm();
    return ax.norm() / (-pobj) < 1e-8 && xnorm > 1e6;
  }

  const RealProgram& p_;
  SolverOptions opt_;
  int nb_ = 0, m_ = 0, nf_ = 0;
  std::vector<std::vector<BlockRowRef>> block_rows_;
  RMat f_;
  std::vector<RMat> x_, z_;
  RVec y_, xf_;
};

}  // namespace detail

/** Interior-point solve of a real standard-form program. */
inline IpmResult solve_standard(const RealProgram& p, const SolverOptions& opt = {}) {
  detail::Ipm ipm(p, opt);
  return ipm.run();
}

// ---------------------------------------------------------------------------
// Conversion between the complex program and the real standard form
// ---------------------------------------------------------------------------

enum class BasisKind { diag, sym, antisym };

/** Orthonormal Hermitian basis element on indices (p, q), p ≤ q. */
struct BasisElem {
  int p;
  int q;
  BasisKind kind;
};

inline std::vector<BasisElem> hermitian_basis(const std::vector<int>& idx, bool complex_field) {
  std::vector<BasisElem> out;
  for (int a : idx) out.push_back({a, a, BasisKind::diag});
  for (size_t i = 0; i < idx.size(); ++i) {
    for (size_t j = i + 1; j < idx.size(); ++j) {
      const int a = std::min(idx[i], idx[j]), b = std::max(idx[i], idx[j]);
      out.push_back({a, b, BasisKind::sym});
      if (complex_field) out.push_back({a, b, BasisKind::antisym});
    }
  }
  return out;
}

inline void add_basis(CMat& m, const BasisElem& e, cplx coef) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (e.kind) {
    case BasisKind::diag:
      m(e.p, e.p) += coef;
      break;
    case BasisKind::sym:
      m(e.p, e.q) += coef * s;
      m(e.q, e.p) += coef * s;
      break;
    case BasisKind::antisym:
      m(e.p, e.q) += coef * cplx(0, s);
      m(e.q, e.p) += coef * cplx(0, -s);
      break;
  }
}

/** Re Tr(P_e† Y) for a basis element P_e. */
inline double basis_coordinate(const CMat& y, const BasisElem& e) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (e.kind) {
    case BasisKind::diag:
      return y(e.p, e.p).real();
    case BasisKind::sym:
      return s * (y(e.p, e.q).real() + y(e.q, e.p).real());
    case BasisKind::antisym:
      return s * (y(e.p, e.q).imag() - y(e.q, e.p).imag());
  }
  return 0.0;
}

inline Pattern full_pattern(int n) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return {all};
}

/** Layout of the standard form produced from a ConicProgram. */
struct StandardForm {
  struct Piece {
    std::vector<int> idx;        // indices in the variable
    std::vector<BasisElem> basis;  // in variable indices
    bool psd = true;
    int block = -1;
    int free_offset = 0;
  };
  RealProgram prog;
  bool complex_field = true;
  double sign = 1.0;  // +1 minimize, −1 maximize
  double constant = 0.0;
  ConicProgram expanded;  // after norm rewrite and slack introduction
  std::vector<std::vector<Piece>> pieces;  // per expanded variable
  std::vector<int> row_offset;             // per expanded constraint
  std::vector<std::vector<BasisElem>> row_basis;
  int num_user_vars = 0;
  std::vector<std::string> user_constraint_names;
  std::vector<int> expanded_constraint_of_user;  // index into expanded constraints
};

namespace detail {

inline bool is_real_matrix(const CMat& m) {
  return m.imag().cwiseAbs().maxCoeff() == 0.0;
}

/** Adds slack variables so that every constraint is an equality. */
inline ConicProgram canonicalize(const ConicProgram& in, std::vector<int>& con_map,
                                 std::vector<std::string>& names) {
  ConicProgram rewritten = spectral_norm_objective_rewrite(in);
  ConicProgram out;
  for (const auto& v : rewritten.variables()) out.add_variable(v.name, v.n, v.cone, v.pattern);
  con_map.clear();
  names.clear();
  int slack_id = 0;
  for (const auto& c : rewritten.constraints()) {
    std::vector<Term> terms = c.terms;
    if (c.relation == Relation::psd) {
      const int out_dim = terms.front().map.out_dim;
      std::string sname = "slack_" + c.name;
      while (out.variable_index(sname) >= 0) sname += "_" + std::to_string(slack_id++);
      const int s = out.add_variable(sname, out_dim, Cone::psd, c.pattern);
      terms.push_back({s, scale(identity_map(out_dim), -1.0)});
    }
    out.add_constraint(c.name, terms, Relation::equal, c.rhs, c.pattern);
    con_map.push_back(static_cast<int>(out.constraints().size()) - 1);
    names.push_back(c.name);
  }
  const auto& o = rewritten.objective();
  out.set_linear_objective(o.sense, o.linear, o.constant);
  return out;
}

inline void embed_entries(const BasisElem& e, int g, const std::vector<int>& local,
                          double coef, bool complex_field, std::vector<Entry>& out) {
  // local maps variable index -> position in the piece
  const int p = local[e.p], q = local[e.q];
  if (!complex_field) {
    if (e.kind == BasisKind::diag) {
      out.push_back({p, p, coef});
    } else {
      const double s = coef / std::sqrt(2.0);
      out.push_back({p, q, s});
      out.push_back({q, p, s});
    }
    return;
  }
  const double h = 0.5 * coef;
  const double s = h / std::sqrt(2.0);
  switch (e.kind) {
    case BasisKind::diag:
      out.push_back({p, p, h});
      out.push_back({p + g, p + g, h});
      break;
    case BasisKind::sym:
      out.push_back({p, q, s});
      out.push_back({q, p, s});
      out.push_back({p + g, q + g, s});
      out.push_back({q + g, p + g, s});
      break;
    case BasisKind::antisym:
      // E(H) = [[Re H, −Im H], [Im H, Re H]] with Im H(p,q) = 1/√2
      out.push_back({g + p, q, s});
      out.push_back({q, g + p, s});
      out.push_back({g + q, p, -s});
      out.push_back({p, g + q, -s});
      break;
  }
}

}  // namespace detail

/**
 * Builds the real standard form. With complex_field each Hermitian g-block
 * becomes a real symmetric 2g-block [[Re, −Im], [Im, Re]]; otherwise the
 * program must be real and blocks map one to one.
 */
inline StandardForm to_standard_form(const ConicProgram& prog, bool complex_field = true) {
  StandardForm sf;
  sf.complex_field = complex_field;
  sf.num_user_vars = static_cast<int>(prog.variables().size());
  sf.expanded = detail::canonicalize(prog, sf.expanded_constraint_of_user,
                                     sf.user_constraint_names);
  const ConicProgram& ex = sf.expanded;
  const auto& obj = ex.objective();
  sf.sign = obj.sense == Sense::minimize ? 1.0 : -1.0;
  sf.constant = obj.constant;
  RealProgram& rp = sf.prog;

  // variables → pieces
  std::vector<std::vector<int>> local(ex.variables().size());
  std::vector<std::vector<int>> basis_global_offset(ex.variables().size());
  int total_basis = 0;
  std::vector<std::pair<int, int>> global_basis;  // (var, piece) per global basis id
  std::vector<int> global_elem;                   // elem index within piece
  sf.pieces.resize(ex.variables().size());
  for (size_t k = 0; k < ex.variables().size(); ++k) {
    const auto& v = ex.variables()[k];
    local[k].assign(v.n, -1);
    const Pattern pat = v.pattern.empty() ? full_pattern(v.n) : v.pattern;
    for (const auto& grp : pat) {
      if (grp.empty()) continue;
      StandardForm::Piece piece;
      piece.idx = grp;
      std::sort(piece.idx.begin(), piece.idx.end());
      for (size_t i = 0; i < piece.idx.size(); ++i) local[k][piece.idx[i]] = static_cast<int>(i);
      piece.basis = hermitian_basis(piece.idx, complex_field);
      piece.psd = v.cone == Cone::psd;
      const int g = static_cast<int>(piece.idx.size());
      if (piece.psd) {
        piece.block = static_cast<int>(rp.block_sizes.size());
        rp.block_sizes.push_back(complex_field ? 2 * g : g);
      } else {
        piece.free_offset = rp.num_free;
        rp.num_free += static_cast<int>(piece.basis.size());
      }
      basis_global_offset[k].push_back(total_basis);
      for (size_t e = 0; e < piece.basis.size(); ++e) {
        global_basis.push_back({static_cast<int>(k), static_cast<int>(sf.pieces[k].size())});
        global_elem.push_back(static_cast<int>(e));
      }
      total_basis += static_cast<int>(piece.basis.size());
      sf.pieces[k].push_back(std::move(piece));
    }
  }

  // constraints → rows via coefficients ⟨Q_r, L(P_j)⟩
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> bvals;
  int row = 0;
  for (const auto& c : ex.constraints()) {
    const int out = c.terms.front().map.out_dim;
    const Pattern pat = c.pattern.empty() ? full_pattern(out) : c.pattern;
    // row lookup: diag index and (sym, antisym) pair per ordered (a<b)
    std::vector<int> group(out, -1);
    for (size_t gi = 0; gi < pat.size(); ++gi) {
      for (int a : pat[gi]) group[a] = static_cast<int>(gi);
    }
    std::vector<BasisElem> rbasis;
    for (const auto& grp : pat) {
      auto bb = hermitian_basis(grp, complex_field);
      rbasis.insert(rbasis.end(), bb.begin(), bb.end());
    }
    Eigen::MatrixXi lookup = Eigen::MatrixXi::Constant(out, out, -1);
    for (size_t r = 0; r < rbasis.size(); ++r) {
      const auto& e = rbasis[r];
      if (e.kind == BasisKind::antisym) continue;
      lookup(e.p, e.q) = static_cast<int>(r);
    }
    sf.row_offset.push_back(row);
    if (!complex_field && !detail::is_real_matrix(c.rhs)) {
      throw std::invalid_argument("real-field standard form requires real data");
    }
    for (const auto& e : rbasis) bvals.push_back(basis_coordinate(c.rhs, e));
    for (int gi = 0; gi < out; ++gi) {
      for (int gj = 0; gj < out; ++gj) {
        if (group[gi] != group[gj] && std::abs(c.rhs(gi, gj)) > 1e-9) {
          throw std::invalid_argument("constraint " + c.name + ": rhs outside pattern");
        }
      }
    }
    for (const auto& term : c.terms) {
      const int k = term.var;
      const auto& v = ex.variables()[k];
      for (size_t pi = 0; pi < sf.pieces[k].size(); ++pi) {
        const auto& piece = sf.pieces[k][pi];
        for (size_t ei = 0; ei < piece.basis.size(); ++ei) {
          CMat pj = CMat::Zero(v.n, v.n);
          add_basis(pj, piece.basis[ei], 1.0);
          const CMat y = term.map(pj);
          const double scale_y = std::max(1.0, y.cwiseAbs().maxCoeff());
          const int col = basis_global_offset[k][pi] + static_cast<int>(ei);
          for (int a = 0; a < out; ++a) {
            for (int b = a; b < out; ++b) {
              const cplx yab = y(a, b), yba = y(b, a);
              if (yab == 0.0 && yba == 0.0) continue;
              if (group[a] != group[b]) {
                if (std::abs(yab) > 1e-12 * scale_y || std::abs(yba) > 1e-12 * scale_y) {
                  throw std::invalid_argument("constraint " + c.name +
                                              ": linear map output outside pattern");
                }
                continue;
              }
              const int r = lookup(a, b);
              if (a == b) {
                if (yab.real() != 0.0) trip.emplace_back(row + r, col, yab.real());
              } else {
                const double s = (yab.real() + yba.real()) / std::sqrt(2.0);
                if (s != 0.0) trip.emplace_back(row + r, col, s);
                if (complex_field) {
                  const double t = (yab.imag() - yba.imag()) / std::sqrt(2.0);
                  if (t != 0.0) trip.emplace_back(row + r + 1, col, t);
                } else if (std::abs(yab.imag()) + std::abs(yba.imag()) > 1e-12 * scale_y) {
                  throw std::invalid_argument("real-field standard form requires real data");
                }
              }
            }
          }
        }
      }
    }
    sf.row_basis.push_back(rbasis);
    row += static_cast<int>(rbasis.size());
  }
  const int m = row;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a(m, total_basis);
  a.setFromTriplets(trip.begin(), trip.end());
  a.prune(0.0);

  rp.rows.assign(m, Row{});
  rp.b = Eigen::Map<RVec>(bvals.data(), static_cast<long>(bvals.size()));
  for (int r = 0; r < m; ++r) {
    std::map<int, size_t> block_pos;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a, r); it; ++it) {
      const int j = static_cast<int>(it.col());
      const auto [k, pi] = global_basis[j];
      const auto& piece = sf.pieces[k][pi];
      const auto& e = piece.basis[global_elem[j]];
      if (piece.psd) {
        auto found = block_pos.find(piece.block);
        if (found == block_pos.end()) {
          found = block_pos.emplace(piece.block, rp.rows[r].blocks.size()).first;
          rp.rows[r].blocks.push_back({piece.block, {}});
        }
        detail::embed_entries(e, static_cast<int>(piece.idx.size()), local[k], it.value(),
                              complex_field, rp.rows[r].blocks[found->second].entries);
      } else {
        rp.rows[r].free.push_back({piece.free_offset + global_elem[j], it.value()});
      }
    }
  }

  // objective
  rp.c.resize(rp.block_sizes.size());
  for (size_t k = 0; k < rp.block_sizes.size(); ++k) {
    rp.c[k] = RMat::Zero(rp.block_sizes[k], rp.block_sizes[k]);
  }
  rp.c_free = RVec::Zero(rp.num_free);
  for (const auto& t : obj.linear) {
    const CMat ch = qcore::hermitian_part(t.c);
    if (!complex_field && !detail::is_real_matrix(ch)) {
      throw std::invalid_argument("real-field standard form requires real data");
    }
    for (const auto& piece : sf.pieces[t.var]) {
      for (size_t ei = 0; ei < piece.basis.size(); ++ei) {
        const double coef = sf.sign * basis_coordinate(ch, piece.basis[ei]);
        if (coef == 0.0) continue;
        if (piece.psd) {
          std::vector<Entry> ents;
          detail::embed_entries(piece.basis[ei], static_cast<int>(piece.idx.size()),
                                local[t.var], coef, complex_field, ents);
          for (const auto& en : ents) rp.c[piece.block](en.r, en.c) += en.v;
        } else {
          rp.c_free(piece.free_offset + static_cast<int>(ei)) += coef;
        }
      }
    }
  }
  return sf;
}

/** The complex-to-real embedding of a program (standard form data only). */
inline RealProgram embed_complex(const ConicProgram& prog) {
  return to_standard_form(prog, true).prog;
}

struct ConicSolution {
  Status status = Status::numerical_failure;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  std::map<std::string, CMat> variable_values;
  /** Multipliers Y_c with value = Σ_c ⟨B_c, Y_c⟩ + constant at optimum. */
  std::map<std::string, CMat> constraint_duals;

  bool optimal() const { return status == Status::optimal; }
  const CMat& value(const std::string& name) const { return variable_values.at(name); }
  const CMat& dual(const std::string& name) const { return constraint_duals.at(name); }
};

/** Directory for optional program dumps; empty disables dumping. */
inline std::string& dump_directory() {
  static std::string dir;
  return dir;
}

inline void dump_program(const StandardForm& sf, const std::string& path) {
  std::ofstream os(path);
  if (!os) return;
  os.precision(17);
  os << "variables:\n";
  for (const auto& v : sf.expanded.variables()) {
    os << "  " << v.name << " n=" << v.n << " cone=" << (v.cone == Cone::psd ? "psd" : "free")
       << "\n";
  }
  const auto& p = sf.prog;
  os << "blocks: [";
  for (size_t k = 0; k < p.block_sizes.size(); ++k) os << (k ? ", " : "") << p.block_sizes[k];
  os << "]\nfree: " << p.num_free << "\nrows:\n";
  for (int i = 0; i < p.num_rows(); ++i) {
    os << "  - b: " << p.b(i) << "\n    entries: [";
    bool first = true;
    for (const auto& rb : p.rows[i].blocks) {
      for (const auto& e : rb.entries) {
        os << (first ? "" : ", ") << "[" << rb.block << ", " << e.r << ", " << e.c << ", "
           << e.v << "]";
        first = false;
      }
    }
    os << "]\n    free: [";
    first = true;
    for (const auto& [j, v] : p.rows[i].free) {
      os << (first ? "" : ", ") << "[" << j << ", " << v << "]";
      first = false;
    }
    os << "]\n";
  }
  os << "objective:\n";
  for (size_t k = 0; k < p.c.size(); ++k) {
    os << "  - block " << k << ": [";
    for (int r = 0; r < p.c[k].rows(); ++r) {
      os << (r ? ", " : "") << "[";
      for (int c = 0; c < p.c[k].cols(); ++c) os << (c ? ", " : "") << p.c[k](r, c);
      os << "]";
    }
    os << "]\n";
  }
}

inline void maybe_dump(const StandardForm& sf) {
  const std::string& dir = dump_directory();
  if (dir.empty()) return;
  static std::atomic<int> counter{0};
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  char name[64];
  std::snprintf(name, sizeof(name), "/program_%04d.txt", counter++);
  dump_program(sf, dir + name);
}

/** Recovers user-level values from a standard-form result. */
inline ConicSolution recover(const StandardForm& sf, const IpmResult& r) {
  ConicSolution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.primal_infeasibility = r.primal_infeasibility;
  sol.dual_infeasibility = r.dual_infeasibility;
  sol.primal_value = sf.sign * r.primal_objective + sf.constant;
  sol.dual_value = sf.sign * r.dual_objective + sf.constant;
  if (sol.status == Status::unbounded) {
    sol.primal_value = sf.sign * -std::numeric_limits<double>::infinity();
  }
  if (sol.status == Status::infeasible) {
    sol.primal_value = sf.sign * std::numeric_limits<double>::infinity();
  }
  sol.gap = std::abs(sol.primal_value - sol.dual_value) / std::max(1.0, std::abs(sol.primal_value));
  if (!std::isfinite(sol.gap)) sol.gap = std::numeric_limits<double>::infinity();
  const auto& vars = sf.expanded.variables();
  for (size_t k = 0; k < vars.size(); ++k) {
    const auto& v = vars[k];
    CMat x = CMat::Zero(v.n, v.n);
    for (const auto& piece : sf.pieces[k]) {
      const int g = static_cast<int>(piece.idx.size());
      if (piece.psd) {
        const RMat& xt = r.x.at(piece.block);
        for (int a = 0; a < g; ++a) {
          for (int b = 0; b < g; ++b) {
            cplx val;
            if (sf.complex_field) {
              val = cplx(0.5 * (xt(a, b) + xt(a + g, b + g)),
                         0.5 * (xt(a + g, b) - xt(a, b + g)));
            } else {
              val = xt(a, b);
            }
            x(piece.idx[a], piece.idx[b]) = val;
          }
        }
      } else {
        for (size_t ei = 0; ei < piece.basis.size(); ++ei) {
          add_basis(x, piece.basis[ei], r.x_free(piece.free_offset + static_cast<int>(ei)));
        }
      }
    }
    sol.variable_values[v.name] = x;
  }
  const auto& cons = sf.expanded.constraints();
  for (size_t u = 0; u < sf.user_constraint_names.size(); ++u) {
    const int ci = sf.expanded_constraint_of_user[u];
    const int out = cons[ci].terms.front().map.out_dim;
    CMat y = CMat::Zero(out, out);
    const auto& basis = sf.row_basis[ci];
    for (size_t e = 0; e < basis.size(); ++e) {
      add_basis(y, basis[e], sf.sign * r.y(sf.row_offset[ci] + static_cast<int>(e)));
    }
    sol.constraint_duals[sf.user_constraint_names[u]] = y;
  }
  return sol;
}

inline ConicSolution solve(const ConicProgram& prog, const SolverOptions& opt = {}) {
  const StandardForm sf = to_standard_form(prog, !opt.real_field);
  maybe_dump(sf);
  const IpmResult r = solve_standard(sf.prog, opt);
  return recover(sf, r);
}

inline ConicSolution solve(const ConicProgram& prog, double tol) {
  SolverOptions opt;
  opt.tol = tol;
  return solve(prog, opt);
}

/** Max violation of the user constraints at the returned values. */
inline double constraint_violation(const ConicProgram& prog, const ConicSolution& sol) {
  double worst = 0.0;
  for (const auto& c : prog.constraints()) {
    const int out = c.terms.front().map.out_dim;
    CMat lhs = CMat::Zero(out, out);
    for (const auto& t : c.terms) {
      lhs += t.map(sol.value(prog.variables()[t.var].name));
    }
    const CMat d = qcore::hermitian_part(lhs - c.rhs);
    if (c.relation == Relation::equal) {
      worst = std::max(worst, d.cwiseAbs().maxCoeff());
    } else {
      worst = std::max(worst, -qcore::min_eigenvalue(d));
    }
  }
  for (const auto& v : prog.variables()) {
    if (v.cone == Cone::psd) {
      worst = std::max(worst, -qcore::min_eigenvalue(sol.value(v.name)));
    }
  }
  return worst;
}

}  // namespace biqap::conic

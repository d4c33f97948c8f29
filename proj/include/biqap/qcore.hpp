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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace biqap {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Dims = std::vector<int>;

constexpr double kPi = 3.14159265358979323846;

namespace qcore {

/** Ordered subsystem dimensions with optional display labels. */
struct DimSig {
  Dims dims;
  std::vector<std::string> labels;

  DimSig() = default;
  DimSig(Dims d) : dims(std::move(d)) { validate(); }
  DimSig(Dims d, std::vector<std::string> l)
      : dims(std::move(d)), labels(std::move(l)) {
    validate();
  }

  int size() const { return static_cast<int>(dims.size()); }
  long total() const {
    long t = 1;
    for (int d : dims) t *= d;
    return t;
  }

  void validate() const {
    for (int d : dims) {
      if (d < 1) throw std::invalid_argument("DimSig: dimensions must be >= 1");
    }
    if (!labels.empty()) {
      if (labels.size() != dims.size()) {
        throw std::invalid_argument("DimSig: label count differs from dims");
      }
      std::set<std::string> seen(labels.begin(), labels.end());
      if (seen.size() != labels.size()) {
        throw std::invalid_argument("DimSig: labels must be unique");
      }
    }
  }

  static DimSig concat(const DimSig& a, const DimSig& b) {
    DimSig out;
    out.dims = a.dims;
    out.dims.insert(out.dims.end(), b.dims.begin(), b.dims.end());
    if (!a.labels.empty() && !b.labels.empty()) {
      out.labels = a.labels;
      out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
      std::set<std::string> seen(out.labels.begin(), out.labels.end());
      if (seen.size() != out.labels.size()) out.labels.clear();
    }
    return out;
  }
};

inline long dim_product(const Dims& dims) {
  long t = 1;
  for (int d : dims) t *= d;
  return t;
}

/** A complex matrix together with row and column subsystem signatures. */
class Operator {
 public:
  Operator() = default;
  Operator(CMat m, DimSig row, DimSig col)
      : m_(std::move(m)), row_(std::move(row)), col_(std::move(col)) {
    check();
  }
  /** Square operator with the same signature on both sides. */
  Operator(CMat m, DimSig sig) : m_(std::move(m)), row_(sig), col_(sig) {
    check();
  }
  /** Square operator on a single subsystem. */
  explicit Operator(CMat m)
      : m_(std::move(m)),
        row_(Dims{static_cast<int>(m_.rows())}),
        col_(Dims{static_cast<int>(m_.cols())}) {}

  const CMat& matrix() const { return m_; }
  CMat& matrix() { return m_; }
  const DimSig& sig_row() const { return row_; }
  const DimSig& sig_col() const { return col_; }
  const Dims& dims() const { return row_.dims; }
  bool is_square() const { return m_.rows() == m_.cols(); }

 private:
  void check() const {
    if (row_.total() != m_.rows() || col_.total() != m_.cols()) {
      throw std::invalid_argument(
          "Operator: matrix shape inconsistent with signature");
    }
  }

  CMat m_;
  DimSig row_;
  DimSig col_;
};

inline CMat hermitian_part(const CMat& m) { return (m + m.adjoint()) / 2.0; }

/** Index map for a permutation of subsystems: new order lists old positions. */
inline std::vector<long> permutation_index_map(const Dims& dims,
                                               const std::vector<int>& perm) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != n) {
    throw std::invalid_argument("permutation size mismatch");
  }
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) {
      throw std::invalid_argument("invalid subsystem permutation");
    }
    seen[p] = true;
  }
  std::vector<long> old_stride(n), new_stride(n);
  long s = 1;
  for (int k = n - 1; k >= 0; --k) {
    old_stride[k] = s;
    s *= dims[k];
  }
  const long total = s;
  s = 1;
  for (int k = n - 1; k >= 0; --k) {
    new_stride[k] = s;
    s *= dims[perm[k]];
  }
  std::vector<long> map(total);
  for (long i = 0; i < total; ++i) {
    long rest = i, j = 0;
    for (int k = 0; k < n; ++k) {
      const long digit = rest / old_stride[k];
      rest %= old_stride[k];
      // old subsystem k sits at new position pos with perm[pos] == k
      for (int pos = 0; pos < n; ++pos) {
        if (perm[pos] == k) {
          j += digit * new_stride[pos];
          break;
        }
      }
    }
    map[i] = j;
  }
  return map;
}

/** Reorders subsystems so that new subsystem k is old subsystem perm[k]. */
inline CMat permute_subsystems(const CMat& m, const Dims& dims,
                               const std::vector<int>& perm) {
  const long total = dim_product(dims);
  if (m.rows() != total) {
    throw std::invalid_argument("permute_subsystems: dimension mismatch");
  }
  const auto map = permutation_index_map(dims, perm);
  if (m.cols() == 1) {
    CMat out(total, 1);
    for (long i = 0; i < total; ++i) out(map[i], 0) = m(i, 0);
    return out;
  }
  if (m.cols() != total) {
    throw std::invalid_argument("permute_subsystems: operator must be square");
  }
  CMat out(total, total);
  for (long j = 0; j < total; ++j) {
    for (long i = 0; i < total; ++i) out(map[i], map[j]) = m(i, j);
  }
  return out;
}

inline Dims permute_dims(const Dims& dims, const std::vector<int>& perm) {
  Dims out(perm.size());
  for (size_t k = 0; k < perm.size(); ++k) out[k] = dims[perm[k]];
  return out;
}

inline std::vector<int> inverse_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<int>(k);
  return inv;
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline CMat kron_all(const std::vector<CMat>& ops) {
  CMat out = CMat::Identity(1, 1);
  for (const auto& o : ops) out = kron(out, o);
  return out;
}

inline Operator tensor(const Operator& a, const Operator& b) {
  return Operator(kron(a.matrix(), b.matrix()),
                  DimSig::concat(a.sig_row(), b.sig_row()),
                  DimSig::concat(a.sig_col(), b.sig_col()));
}

inline void check_subsystems(const Dims& dims, const std::vector<int>& subs) {
  std::set<int> seen;
  for (int s : subs) {
    if (s < 0 || s >= static_cast<int>(dims.size())) {
      throw std::out_of_range("subsystem index out of range");
    }
    if (!seen.insert(s).second) {
      throw std::invalid_argument("repeated subsystem index");
    }
  }
}

/** Partial trace keeping the listed subsystems (in their original order). */
inline CMat partial_trace(const CMat& m, const Dims& dims,
                          std::vector<int> keep) {
  check_subsystems(dims, keep);
  if (m.rows() != m.cols() || m.rows() != dim_product(dims)) {
    throw std::invalid_argument("partial_trace: shape mismatch");
  }
  std::sort(keep.begin(), keep.end());
  std::vector<int> perm = keep;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
    if (!std::binary_search(keep.begin(), keep.end(), k)) perm.push_back(k);
  }
  long dk = 1;
  for (int k : keep) dk *= dims[k];
  const long dt = dim_product(dims) / dk;
  const CMat p = permute_subsystems(m, dims, perm);
  CMat out = CMat::Zero(dk, dk);
  for (long i = 0; i < dk; ++i) {
    for (long j = 0; j < dk; ++j) {
      cplx s = 0;
      for (long t = 0; t < dt; ++t) s += p(i * dt + t, j * dt + t);
      out(i, j) = s;
    }
  }
  return out;
}

inline Operator partial_trace(const Operator& op, std::vector<int> keep) {
  if (!op.is_square()) throw std::invalid_argument("partial_trace: not square");
  const Dims& dims = op.dims();
  check_subsystems(dims, keep);
  std::sort(keep.begin(), keep.end());
  DimSig sig;
  for (int k : keep) {
    sig.dims.push_back(dims[k]);
    if (!op.sig_row().labels.empty()) {
      sig.labels.push_back(op.sig_row().labels[k]);
    }
  }
  if (sig.dims.empty()) sig.dims.push_back(1);
  return Operator(partial_trace(op.matrix(), dims, keep), sig);
}

/** Transposes the listed subsystems in the computational basis. */
inline CMat partial_transpose(const CMat& m, const Dims& dims,
                              const std::vector<int>& subs) {
  check_subsystems(dims, subs);
  const long total = dim_product(dims);
  if (m.rows() != total || m.cols() != total) {
    throw std::invalid_argument("partial_transpose: shape mismatch");
  }
  const int n = static_cast<int>(dims.size());
  std::vector<long> stride(n);
  long s = 1;
  for (int k = n - 1; k >= 0; --k) {
    stride[k] = s;
    s *= dims[k];
  }
  // per index: contribution of the transposed digits
  std::vector<long> tpart(total, 0);
  for (long i = 0; i < total; ++i) {
    long v = 0;
    for (int k : subs) v += ((i / stride[k]) % dims[k]) * stride[k];
    tpart[i] = v;
  }
  CMat out(total, total);
  for (long j = 0; j < total; ++j) {
    for (long i = 0; i < total; ++i) {
      const long ni = i - tpart[i] + tpart[j];
      const long nj = j - tpart[j] + tpart[i];
      out(ni, nj) = m(i, j);
    }
  }
  return out;
}

inline Operator partial_transpose(const Operator& op,
                                  const std::vector<int>& subs) {
  if (!op.is_square()) {
    throw std::invalid_argument("partial_transpose: not square");
  }
  return Operator(partial_transpose(op.matrix(), op.dims(), subs),
                  op.sig_row(), op.sig_col());
}

/** Embeds an operator acting on `targets` into the full space. */
inline CMat apply_on_subsystems(const CMat& local, const Dims& dims,
                                const std::vector<int>& targets) {
  check_subsystems(dims, targets);
  std::vector<int> perm = targets;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
    if (std::find(targets.begin(), targets.end(), k) == targets.end()) {
      perm.push_back(k);
    }
  }
  long dt = 1;
  for (int k : targets) dt *= dims[k];
  if (local.rows() != dt || local.cols() != dt) {
    throw std::invalid_argument("apply_on_subsystems: local size mismatch");
  }
  const long rest = dim_product(dims) / dt;
  const CMat big = kron(local, CMat::Identity(rest, rest));
  return permute_subsystems(big, permute_dims(dims, perm),
                            inverse_permutation(perm));
}

/** Σ_i |i⟩|i⟩, optionally normalized. */
inline CVec max_entangled_vector(int d, bool normalized) {
  if (d < 1) throw std::invalid_argument("max_entangled_vector: d < 1");
  CVec v = CVec::Zero(static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i) v(static_cast<long>(i) * d + i) = 1.0;
  if (normalized) v /= std::sqrt(static_cast<double>(d));
  return v;
}

/** Normalized maximally entangled projector Φ_d on d ⊗ d. */
inline CMat max_entangled_state(int d) {
  const CVec v = max_entangled_vector(d, true);
  return v * v.adjoint();
}

inline CMat maximally_mixed(int d) {
  return CMat::Identity(d, d) / static_cast<double>(d);
}

inline CMat ket(int d, int i) {
  CMat v = CMat::Zero(d, 1);
  v(i, 0) = 1.0;
  return v;
}

inline CMat projector(const CVec& v) { return v * v.adjoint(); }

inline CMat shift_operator(int d, int k) {
  CMat x = CMat::Zero(d, d);
  for (int j = 0; j < d; ++j) x((j + k) % d, j) = 1.0;
  return x;
}

inline CMat phase_operator(int d, int l) {
  CMat z = CMat::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    z(j, j) = std::polar(1.0, 2.0 * kPi * l * j / d);
  }
  return z;
}

/** σ(k,l) = X(k) Z(l). */
inline CMat heisenberg_weyl(int d, int k, int l) {
  if (d < 1 || k < 0 || k >= d || l < 0 || l >= d) {
    throw std::out_of_range("heisenberg_weyl: index out of range");
  }
  return shift_operator(d, k) * phase_operator(d, l);
}

/** Heisenberg–Weyl element with the flat index w = k + d·l. */
inline CMat heisenberg_weyl_index(int d, int w) {
  return heisenberg_weyl(d, w % d, w / d);
}

struct HeisenbergWeyl {
  int d = 2;
  int k = 0;
  int l = 0;
  CMat matrix() const { return heisenberg_weyl(d, k, l); }
};

// ---- spectral helpers ----

inline RVec eigenvalues_hermitian(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/** Applies f to the eigenvalues of a Hermitian matrix. */
template <typename F>
CMat hermitian_function(const CMat& h, F&& f) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h));
  const RVec& ev = es.eigenvalues();
  RVec fv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) fv(i) = f(ev(i));
  const CMat& u = es.eigenvectors();
  return u * fv.cast<cplx>().asDiagonal() * u.adjoint();
}

inline CMat sqrtm_psd(const CMat& h) {
  return hermitian_function(h, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

inline double min_eigenvalue(const CMat& h) {
  return eigenvalues_hermitian(h).minCoeff();
}

inline double max_eigenvalue(const CMat& h) {
  return eigenvalues_hermitian(h).maxCoeff();
}

inline double trace_norm(const CMat& m) {
  if (m.rows() == m.cols() && (m - m.adjoint()).norm() <= 1e-13 * (1.0 + m.norm())) {
    return eigenvalues_hermitian(m).cwiseAbs().sum();
  }
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues().sum();
}

inline double operator_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && (m - m.adjoint()).norm() <= 1e-13 * (1.0 + m.norm())) {
    return eigenvalues_hermitian(m).cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

inline double trace_norm(const Operator& op) { return trace_norm(op.matrix()); }
inline double operator_norm(const Operator& op) {
  return operator_norm(op.matrix());
}

constexpr double kEntropyCutoff = 1e-12;
constexpr double kDefaultStateTol = 1e-9;

/** A validated density operator: Hermitian, PSD and unit trace within tol. */
class DensityOperator {
 public:
  DensityOperator() = default;

  DensityOperator(const CMat& m, DimSig sig, double tol = kDefaultStateTol)
      : op_(hermitian_part(m), std::move(sig)), tol_(tol) {
    validate();
  }
  DensityOperator(const CMat& m, double tol = kDefaultStateTol)
      : DensityOperator(m, DimSig(Dims{static_cast<int>(m.rows())}), tol) {}
  DensityOperator(const CMat& m, const Dims& dims,
                  double tol = kDefaultStateTol)
      : DensityOperator(m, DimSig(dims), tol) {}

  static DensityOperator pure(const CVec& psi, const Dims& dims) {
    return DensityOperator(psi * psi.adjoint() / psi.squaredNorm(), dims);
  }

  const Operator& op() const { return op_; }
  const CMat& matrix() const { return op_.matrix(); }
  const Dims& dims() const { return op_.dims(); }
  double tol() const { return tol_; }
  long dim() const { return op_.matrix().rows(); }

 private:
  void validate() const {
    const CMat& m = op_.matrix();
    if (m.rows() != m.cols()) {
      throw std::invalid_argument("DensityOperator: matrix not square");
    }
    if (std::abs(m.trace().real() - 1.0) > tol_) {
      throw std::invalid_argument("DensityOperator: trace differs from 1");
    }
    if (min_eigenvalue(m) < -tol_) {
      throw std::invalid_argument("DensityOperator: negative eigenvalue");
    }
  }

  Operator op_;
  double tol_ = kDefaultStateTol;
};

/** Entropy in bits of a probability-like spectrum, ignoring tiny entries. */
inline double spectrum_entropy(const RVec& ev) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double p = ev(i);
    if (p > kEntropyCutoff) s -= p * std::log2(p);
  }
  return s;
}

inline double von_neumann_entropy(const CMat& rho) {
  return spectrum_entropy(eigenvalues_hermitian(rho));
}

inline double von_neumann_entropy(const DensityOperator& rho) {
  return von_neumann_entropy(rho.matrix());
}

/** S of the marginal on `subs` (empty set → 0). */
inline double marginal_entropy(const CMat& rho, const Dims& dims,
                               const std::vector<int>& subs) {
  if (subs.empty()) return 0.0;
  if (static_cast<int>(subs.size()) == static_cast<int>(dims.size())) {
    return von_neumann_entropy(rho);
  }
  return von_neumann_entropy(partial_trace(rho, dims, subs));
}

/** Subsystem groups for entropic quantities; `c` may be empty. */
struct Partition {
  std::vector<int> a;
  std::vector<int> b;
  std::vector<int> c;
};

struct EntropicQuantities {
  double conditional_entropy = 0.0;   // S(A|B)
  double mutual_information = 0.0;    // I(A;B)
  double conditional_mutual_information = 0.0;  // I(A;B|C)
  double coherent_information = 0.0;  // I(A⟩B) = −S(A|B)
};

inline std::vector<int> merge_subsystems(const std::vector<int>& x,
                                         const std::vector<int>& y) {
  std::vector<int> out = x;
  out.insert(out.end(), y.begin(), y.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline EntropicQuantities entropic_quantities(const DensityOperator& rho,
                                              const Partition& part) {
  const Dims& dims = rho.dims();
  if (part.a.empty() || part.b.empty()) {
    throw std::invalid_argument("entropic_quantities: empty partition part");
  }
  std::vector<int> all = part.a;
  all.insert(all.end(), part.b.begin(), part.b.end());
  all.insert(all.end(), part.c.begin(), part.c.end());
  check_subsystems(dims, all);
  const CMat& m = rho.matrix();
  const double s_a = marginal_entropy(m, dims, part.a);
  const double s_b = marginal_entropy(m, dims, part.b);
  const double s_ab = marginal_entropy(m, dims, merge_subsystems(part.a, part.b));
  EntropicQuantities q;
  q.conditional_entropy = s_ab - s_b;
  q.coherent_information = -q.conditional_entropy;
  q.mutual_information = s_a + s_b - s_ab;
  if (part.c.empty()) {
    q.conditional_mutual_information = q.mutual_information;
  } else {
    const double s_c = marginal_entropy(m, dims, part.c);
    const double s_ac = marginal_entropy(m, dims, merge_subsystems(part.a, part.c));
    const double s_bc = marginal_entropy(m, dims, merge_subsystems(part.b, part.c));
    const double s_abc = marginal_entropy(m, dims, merge_subsystems(
                                                       merge_subsystems(part.a, part.b), part.c));
    q.conditional_mutual_information = s_ac + s_bc - s_abc - s_c;
  }
  return q;
}

inline double fidelity(const CMat& tau, const CMat& sigma) {
  if (tau.rows() != sigma.rows() || tau.cols() != sigma.cols()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  const CMat st = sqrtm_psd(tau);
  const RVec ev = eigenvalues_hermitian(st * sigma * st);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::sqrt(std::max(ev(i), 0.0));
  return std::clamp(s * s, 0.0, 1.0);
}

inline double fidelity(const DensityOperator& tau, const DensityOperator& sigma) {
  return fidelity(tau.matrix(), sigma.matrix());
}

/** g(ε) = (1+ε)log₂(1+ε) − ε log₂ ε. */
inline double g_func(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::out_of_range("g_func: epsilon outside [0,1]");
  }
  if (eps == 0.0) return 0.0;
  return (1.0 + eps) * std::log2(1.0 + eps) - eps * std::log2(eps);
}

enum class ContinuityKind {
  general,          // bound 2ε log|A| + g(ε)
  classical_quantum // A or L classical: bound ε log|A| + g(ε)
};

struct ContinuityCheck {
  double epsilon = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/**
 * Checks the uniform continuity bound for conditional entropy S(A|L) between
 * two states on the same space. `a` lists the subsystems of A, `l` those of L.
 */
inline ContinuityCheck afw_bound_check(const DensityOperator& rho,
                                       const DensityOperator& sigma,
                                       const std::vector<int>& a,
                                       const std::vector<int>& l,
                                       ContinuityKind kind = ContinuityKind::general) {
  if (rho.dims() != sigma.dims()) {
    throw std::invalid_argument("afw_bound_check: signature mismatch");
  }
  const Dims& dims = rho.dims();
  std::vector<int> al = a;
  al.insert(al.end(), l.begin(), l.end());
  check_subsystems(dims, al);
  if (a.empty()) throw std::invalid_argument("afw_bound_check: empty A");
  auto cond = [&](const CMat& m) {
    return marginal_entropy(m, dims, merge_subsystems(a, l)) -
           marginal_entropy(m, dims, l);
  };
  ContinuityCheck c;
  c.epsilon = std::min(1.0, 0.5 * trace_norm(CMat(rho.matrix() - sigma.matrix())));
  c.lhs = std::abs(cond(rho.matrix()) - cond(sigma.matrix()));
  double da = 1.0;
  for (int k : a) da *= dims[k];
  const double factor = kind == ContinuityKind::general ? 2.0 : 1.0;
  c.rhs = factor * c.epsilon * std::log2(da) + g_func(c.epsilon);
  c.holds = c.lhs <= c.rhs + 1e-12;
  return c;
}

}  // namespace qcore

using qcore::DensityOperator;
using qcore::DimSig;
using qcore::Operator;

}  // namespace biqap

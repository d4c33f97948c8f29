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
#include <string>
#include <vector>

#include "biqap/qcore.hpp"

namespace biqap::channels {

using KrausList = std::vector<CMat>;

constexpr double kChannelTol = 1e-8;

/** Choi operator Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|) on in ⊗ out. */
struct ChannelChoi {
  CMat J;
  int d_in = 0;
  int d_out = 0;

  ChannelChoi() = default;
  ChannelChoi(CMat j, int din, int dout, double tol = kChannelTol)
      : J(std::move(j)), d_in(din), d_out(dout) {
    if (d_in < 1 || d_out < 1 || J.rows() != static_cast<long>(d_in) * d_out ||
        J.cols() != J.rows()) {
      throw std::invalid_argument("ChannelChoi: shape inconsistent with dimensions");
    }
    J = qcore::hermitian_part(J);
    if (tol >= 0.0) {
      if (cp_defect() > tol) throw std::invalid_argument("ChannelChoi: Choi operator not PSD");
      if (tp_defect() > tol) throw std::invalid_argument("ChannelChoi: map not trace preserving");
    }
  }

  Dims dims() const { return {d_in, d_out}; }
  double cp_defect() const { return std::max(0.0, -qcore::min_eigenvalue(J)); }
  double tp_defect() const {
    return (qcore::partial_trace(J, dims(), {0}) - CMat::Identity(d_in, d_in))
        .cwiseAbs()
        .maxCoeff();
  }
};

/** An isometry in → out ⊗ env with rows ordered out ⊗ env. */
struct IsometricExtension {
  CMat V;
  int d_in = 0;
  int d_out = 0;
  int d_env = 0;

  IsometricExtension() = default;
  IsometricExtension(CMat v, int din, int dout, int denv, double tol = kChannelTol)
      : V(std::move(v)), d_in(din), d_out(dout), d_env(denv) {
    if (V.cols() != d_in || V.rows() != static_cast<long>(d_out) * d_env) {
      throw std::invalid_argument("IsometricExtension: shape inconsistent with dimensions");
    }
    if (tol >= 0.0 && isometry_defect() > tol) {
      throw std::invalid_argument("IsometricExtension: V is not an isometry");
    }
  }

  double isometry_defect() const {
    return (V.adjoint() * V - CMat::Identity(d_in, d_in)).cwiseAbs().maxCoeff();
  }
};

/** Alphabet-indexed family of isometries B′ → BE with shared dimensions. */
struct WiretapMemoryCell {
  std::vector<IsometricExtension> elements;

  int size() const { return static_cast<int>(elements.size()); }
  int d_in() const { return elements.front().d_in; }
  int d_b() const { return elements.front().d_out; }
  int d_e() const { return elements.front().d_env; }

  void validate(double tol = kChannelTol) const {
    if (elements.empty()) throw std::invalid_argument("WiretapMemoryCell: empty alphabet");
    for (const auto& e : elements) {
      if (e.d_in != d_in() || e.d_out != d_b() || e.d_env != d_e()) {
        throw std::invalid_argument("WiretapMemoryCell: non-uniform dimensions");
      }
      if (e.isometry_defect() > tol) {
        throw std::invalid_argument("WiretapMemoryCell: element is not an isometry");
      }
    }
  }
};

/**
 * Bidirectional channel A′B′ → AB stored by its Choi operator on
 * S_A ⊗ A ⊗ B ⊗ S_B with S_A ≃ A′ and S_B ≃ B′.
 */
struct BidirectionalChannel {
  CMat J;
  int d_ap = 0;
  int d_a = 0;
  int d_b = 0;
  int d_bp = 0;

  Dims choi_dims() const { return {d_ap, d_a, d_b, d_bp}; }
  int d_in() const { return d_ap * d_bp; }
  int d_out() const { return d_a * d_b; }

  /** Point-to-point Choi on (A′B′) ⊗ (AB). */
  CMat point_to_point_choi() const {
    return qcore::permute_subsystems(J, choi_dims(), {0, 3, 1, 2});
  }

  double tp_defect() const {
    return (qcore::partial_trace(J, choi_dims(), {0, 3}) - CMat::Identity(d_in(), d_in()))
        .cwiseAbs()
        .maxCoeff();
  }
  double cp_defect() const { return std::max(0.0, -qcore::min_eigenvalue(J)); }
};

/** Explicitly stored unitaries; projective phases are kept as given. */
struct GroupRep {
  std::vector<CMat> elements;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(elements.size()); }
  int dim() const { return elements.empty() ? 0 : static_cast<int>(elements.front().rows()); }

  double unitarity_defect() const {
    double w = 0.0;
    for (const auto& u : elements) {
      w = std::max(w, (u.adjoint() * u - CMat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff());
    }
    return w;
  }

  /** Twirl residual max_ρ ‖(1/|G|)Σ UρU† − Tr(ρ)π‖ over a Hermitian basis. */
  double one_design_residual() const {
    const int d = dim();
    double w = 0.0;
    for (int p = 0; p < d; ++p) {
      for (int q = 0; q < d; ++q) {
        CMat rho = CMat::Zero(d, d);
        rho(p, q) = 1.0;
        CMat twirl = CMat::Zero(d, d);
        for (const auto& u : elements) twirl += u * rho * u.adjoint();
        twirl /= static_cast<double>(size());
        const CMat target = rho.trace() * qcore::maximally_mixed(d);
        w = std::max(w, (twirl - target).cwiseAbs().maxCoeff());
      }
    }
    return w;
  }

  bool is_one_design(double tol = 1e-10) const { return one_design_residual() <= tol; }
};

// ---- construction ----

inline double kraus_tp_defect(const KrausList& kraus) {
  const long din = kraus.front().cols();
  CMat s = CMat::Zero(din, din);
  for (const auto& k : kraus) s += k.adjoint() * k;
  return (s - CMat::Identity(din, din)).cwiseAbs().maxCoeff();
}

inline ChannelChoi choi_from_kraus(const KrausList& kraus, double tol = kChannelTol) {
  if (kraus.empty()) throw std::invalid_argument("choi_from_kraus: empty Kraus list");
  const int din = static_cast<int>(kraus.front().cols());
  const int dout = static_cast<int>(kraus.front().rows());
  for (const auto& k : kraus) {
    if (k.cols() != din || k.rows() != dout) {
      throw std::invalid_argument("choi_from_kraus: inconsistent Kraus shapes");
    }
  }
  if (tol >= 0.0 && kraus_tp_defect(kraus) > tol) {
    throw std::invalid_argument("choi_from_kraus: Kraus operators not trace preserving");
  }
  CMat j = CMat::Zero(static_cast<long>(din) * dout, static_cast<long>(din) * dout);
  for (const auto& k : kraus) {
    // (I ⊗ K)|Υ⟩ has component (i, o) = K(o, i)
    CVec v(static_cast<long>(din) * dout);
    for (int i = 0; i < din; ++i) {
      for (int o = 0; o < dout; ++o) v(static_cast<long>(i) * dout + o) = k(o, i);
    }
    j += v * v.adjoint();
  }
  return ChannelChoi(j, din, dout, tol);
}

/** Kraus operators from the spectral decomposition of the Choi operator. */
inline KrausList kraus_from_choi(const CMat& j, int din, int dout, double cutoff = 1e-12) {
  Eigen::SelfAdjointEigenSolver<CMat> es(qcore::hermitian_part(j));
  KrausList out;
  const RVec& ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 0.0);
  for (Eigen::Index k = ev.size() - 1; k >= 0; --k) {
    if (ev(k) <= cutoff * std::max(1.0, top)) continue;
    CMat op(dout, din);
    const double s = std::sqrt(ev(k));
    for (int i = 0; i < din; ++i) {
      for (int o = 0; o < dout; ++o) op(o, i) = s * es.eigenvectors()(static_cast<long>(i) * dout + o, k);
    }
    out.push_back(op);
  }
  if (out.empty()) out.push_back(CMat::Zero(dout, din));
  return out;
}

inline KrausList kraus_from_choi(const ChannelChoi& c, double cutoff = 1e-12) {
  return kraus_from_choi(c.J, c.d_in, c.d_out, cutoff);
}

inline CMat apply_kraus(const KrausList& kraus, const CMat& rho) {
  CMat out = CMat::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

/**
 * Applies a channel given by Kraus operators to the listed subsystems of ρ.
 * The listed subsystems are replaced in place by subsystems with dims `out_dims`.
 */
inline CMat apply_kraus_on(const KrausList& kraus, const CMat& rho, const Dims& dims,
                           const std::vector<int>& targets, const Dims& out_dims) {
  qcore::check_subsystems(dims, targets);
  for (size_t k = 1; k < targets.size(); ++k) {
    if (targets[k] != targets[k - 1] + 1) {
      throw std::invalid_argument("apply_kraus_on: targets must be consecutive");
    }
  }
  long din = 1, dout = 1;
  for (int t : targets) din *= dims[t];
  for (int d : out_dims) dout *= d;
  if (kraus.front().cols() != din || kraus.front().rows() != dout) {
    throw std::invalid_argument("apply_kraus_on: Kraus shape mismatch");
  }
  std::vector<int> perm = targets;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
    if (std::find(targets.begin(), targets.end(), k) == targets.end()) perm.push_back(k);
  }
  const CMat moved = qcore::permute_subsystems(rho, dims, perm);
  const long rest = qcore::dim_product(dims) / din;
  CMat out = CMat::Zero(dout * rest, dout * rest);
  const CMat eye = CMat::Identity(rest, rest);
  for (const auto& k : kraus) {
    const CMat big = qcore::kron(k, eye);
    out += big * moved * big.adjoint();
  }
  // new layout: out_dims..., then remaining subsystems in order
  Dims new_dims = out_dims;
  for (size_t k = targets.size(); k < perm.size(); ++k) new_dims.push_back(dims[perm[k]]);
  // restore order: outputs go where the targets were
  std::vector<int> back;
  const int n_out = static_cast<int>(out_dims.size());
  int rest_pos = n_out;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
    if (k == targets.front()) {
      for (int o = 0; o < n_out; ++o) back.push_back(o);
    }
    if (std::find(targets.begin(), targets.end(), k) == targets.end()) back.push_back(rest_pos++);
  }
  return qcore::permute_subsystems(out, new_dims, back);
}

/**
 * ρ_{S,in} ↦ Tr_in[(ρ^{T_in} ⊗ I_out)(I_S ⊗ J)], the post-selected
 * teleportation form of the channel action.
 */
inline CMat apply_choi(const CMat& j, int din, int dout, const CMat& rho, int d_ref = 1) {
  if (rho.rows() != static_cast<long>(d_ref) * din || rho.cols() != rho.rows()) {
    throw std::invalid_argument("apply_choi: input dimension mismatch");
  }
  CMat out = CMat::Zero(static_cast<long>(d_ref) * dout, static_cast<long>(d_ref) * dout);
  CMat r(d_ref, d_ref);
  for (int i = 0; i < din; ++i) {
    for (int k = 0; k < din; ++k) {
      for (int s = 0; s < d_ref; ++s) {
        for (int t = 0; t < d_ref; ++t) {
          r(s, t) = rho(static_cast<long>(s) * din + i, static_cast<long>(t) * din + k);
        }
      }
      if (r.cwiseAbs().maxCoeff() == 0.0) continue;
      out += qcore::kron(r, j.block(static_cast<long>(i) * dout, static_cast<long>(k) * dout,
                                    dout, dout));
    }
  }
  return out;
}

inline CMat apply_choi(const ChannelChoi& c, const CMat& rho, int d_ref = 1) {
  return apply_choi(c.J, c.d_in, c.d_out, rho, d_ref);
}

inline ChannelChoi identity_channel(int d) {
  const CVec u = qcore::max_entangled_vector(d, false);
  return ChannelChoi(u * u.adjoint(), d, d);
}

inline ChannelChoi unitary_channel(const CMat& u) {
  return choi_from_kraus({u});
}

/** ρ ↦ (1−p)ρ + p Tr(ρ) π. */
inline ChannelChoi depolarizing_channel(int d, double p) {
  if (!(p >= 0.0 && p <= 1.0 + 1.0 / (d * d - 1.0))) {
    throw std::out_of_range("depolarizing_channel: parameter out of range");
  }
  const CVec u = qcore::max_entangled_vector(d, false);
  const CMat j = (1.0 - p) * u * u.adjoint() +
                 p * CMat::Identity(d * d, d * d) / static_cast<double>(d);
  return ChannelChoi(j, d, d);
}

/** Embedding of a qudit into the first d levels of d+1. */
inline CMat erasure_embedding(int d) {
  CMat e = CMat::Zero(d + 1, d);
  for (int i = 0; i < d; ++i) e(i, i) = 1.0;
  return e;
}

inline void check_erasure_args(int d, double q) {
  if (d < 2) throw std::out_of_range("erasure: d must be >= 2");
  if (!(q >= 0.0 && q <= 1.0)) throw std::out_of_range("erasure: q outside [0,1]");
}

/** Kraus set {√(1−q) ι, √q |e⟩⟨i|}. */
inline KrausList erasure_kraus(int d, double q) {
  check_erasure_args(d, q);
  KrausList k;
  k.push_back(std::sqrt(1.0 - q) * erasure_embedding(d));
  for (int i = 0; i < d; ++i) {
    CMat op = CMat::Zero(d + 1, d);
    op(d, i) = std::sqrt(q);
    k.push_back(op);
  }
  return k;
}

inline ChannelChoi erasure_channel(int d, double q) { return choi_from_kraus(erasure_kraus(d, q)); }

/** U^q|ψ⟩ = √(1−q)|ψ⟩_B|e⟩_E + √q|e⟩_B|ψ⟩_E with |e⟩ the last level. */
inline IsometricExtension erasure_isometry(int d, double q) {
  check_erasure_args(d, q);
  const int de = d + 1;
  CMat v = CMat::Zero(static_cast<long>(de) * de, d);
  for (int i = 0; i < d; ++i) {
    v(static_cast<long>(i) * de + d, i) += std::sqrt(1.0 - q);
    v(static_cast<long>(d) * de + i, i) += std::sqrt(q);
  }
  return IsometricExtension(v, d, de, de);
}

/** Elements U^q σ^x, x = k + d·l, |X| = d². */
inline WiretapMemoryCell erasure_wiretap_cell(int d, double q) {
  const IsometricExtension u = erasure_isometry(d, q);
  WiretapMemoryCell cell;
  for (int x = 0; x < d * d; ++x) {
    cell.elements.emplace_back(CMat(u.V * qcore::heisenberg_weyl_index(d, x)), d, d + 1, d + 1);
  }
  return cell;
}

/** V = Σ_j L^j ⊗ |j⟩_E. */
inline IsometricExtension canonical_isometric_extension(const KrausList& kraus,
                                                        double tol = kChannelTol) {
  if (kraus.empty()) throw std::invalid_argument("canonical_isometric_extension: no Kraus ops");
  const int din = static_cast<int>(kraus.front().cols());
  const int dout = static_cast<int>(kraus.front().rows());
  const int r = static_cast<int>(kraus.size());
  CMat v = CMat::Zero(static_cast<long>(dout) * r, din);
  for (int j = 0; j < r; ++j) {
    for (int o = 0; o < dout; ++o) v.row(static_cast<long>(o) * r + j) = kraus[j].row(o);
  }
  return IsometricExtension(v, din, dout, r, tol);
}

/** L^j = (I_out ⊗ ⟨j|_E) V. */
inline KrausList kraus_from_isometry(const IsometricExtension& v) {
  KrausList k(v.d_env, CMat::Zero(v.d_out, v.d_in));
  for (int o = 0; o < v.d_out; ++o) {
    for (int e = 0; e < v.d_env; ++e) k[e].row(o) = v.V.row(static_cast<long>(o) * v.d_env + e);
  }
  return k;
}

/** Kraus operators of the complementary channel, (⟨o|_out ⊗ I_E) V. */
inline KrausList complementary_kraus(const IsometricExtension& v) {
  KrausList k(v.d_out, CMat::Zero(v.d_env, v.d_in));
  for (int o = 0; o < v.d_out; ++o) {
    for (int e = 0; e < v.d_env; ++e) k[o].row(e) = v.V.row(static_cast<long>(o) * v.d_env + e);
  }
  return k;
}

inline ChannelChoi channel_from_isometry(const IsometricExtension& v) {
  return choi_from_kraus(kraus_from_isometry(v));
}

inline ChannelChoi complementary_channel(const IsometricExtension& v) {
  return choi_from_kraus(complementary_kraus(v));
}

// ---- bidirectional channels ----

/** From Kraus operators (AB) × (A′B′). */
inline BidirectionalChannel bidirectional_from_kraus(const KrausList& kraus, int d_ap, int d_bp,
                                                     int d_a, int d_b,
                                                     double tol = kChannelTol) {
  const ChannelChoi pp = choi_from_kraus(kraus, tol);
  if (pp.d_in != d_ap * d_bp || pp.d_out != d_a * d_b) {
    throw std::invalid_argument("bidirectional_from_kraus: dimension mismatch");
  }
  BidirectionalChannel n;
  n.d_ap = d_ap;
  n.d_bp = d_bp;
  n.d_a = d_a;
  n.d_b = d_b;
  // (A′ B′ A B) → (S_A A B S_B)
  n.J = qcore::permute_subsystems(pp.J, {d_ap, d_bp, d_a, d_b}, {0, 2, 3, 1});
  return n;
}

inline BidirectionalChannel bidirectional_from_unitary(const CMat& u, int d_ap, int d_bp) {
  return bidirectional_from_kraus({u}, d_ap, d_bp, d_ap, d_bp);
}

/** From a Choi operator on S_A A B S_B; validated for CPTP. */
inline BidirectionalChannel bidirectional_from_choi(const CMat& j, int d_ap, int d_a, int d_b,
                                                    int d_bp, double tol = kChannelTol) {
  BidirectionalChannel n;
  n.J = qcore::hermitian_part(j);
  n.d_ap = d_ap;
  n.d_a = d_a;
  n.d_b = d_b;
  n.d_bp = d_bp;
  if (j.rows() != static_cast<long>(d_ap) * d_a * d_b * d_bp || j.cols() != j.rows()) {
    throw std::invalid_argument("bidirectional_from_choi: shape mismatch");
  }
  if (n.cp_defect() > tol) throw std::invalid_argument("bidirectional channel not CP");
  if (n.tp_defect() > tol) throw std::invalid_argument("bidirectional channel not TP");
  return n;
}

/** M_{A′→A} ⊗ K_{B′→B}. */
inline BidirectionalChannel bidirectional_from_local(const ChannelChoi& ma, const ChannelChoi& mb) {
  // Choi of a product is the product of Chois on (S_A A)(S_B B) → reorder to S_A A B S_B
  const CMat j = qcore::kron(ma.J, mb.J);
  BidirectionalChannel n;
  n.d_ap = ma.d_in;
  n.d_a = ma.d_out;
  n.d_bp = mb.d_in;
  n.d_b = mb.d_out;
  n.J = qcore::permute_subsystems(j, {ma.d_in, ma.d_out, mb.d_in, mb.d_out}, {0, 1, 3, 2});
  return n;
}

inline KrausList bidirectional_kraus(const BidirectionalChannel& n) {
  return kraus_from_choi(n.point_to_point_choi(), n.d_in(), n.d_out());
}

/** Applies N to ρ on L_A A′ B′ L_B, returning a state on L_A A B L_B. */
inline CMat apply_bidirectional(const BidirectionalChannel& n, const CMat& rho, int d_la,
                                int d_lb) {
  return apply_kraus_on(bidirectional_kraus(n), rho, {d_la, n.d_ap, n.d_bp, d_lb}, {1, 2},
                        {n.d_a, n.d_b});
}

inline CMat cnot_matrix() {
  CMat u = CMat::Zero(4, 4);
  u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
  return u;
}

inline CMat swap_matrix(int d) {
  CMat u = CMat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) u(static_cast<long>(j) * d + i, static_cast<long>(i) * d + j) = 1.0;
  }
  return u;
}

enum class ControlledForm {
  /** Tr_E of the controlled isometry Σ_x |x⟩⟨x| ⊗ U^x. */
  coherent,
  /** Σ_x |x⟩⟨x| ⊗ M^x(⟨x|·|x⟩). */
  dephased,
};

struct ControlledChannel {
  BidirectionalChannel channel;
  /** Σ_x |x⟩⟨x| ⊗ U^x, rows ordered X ⊗ B ⊗ E. */
  IsometricExtension isometry;
  ControlledForm form = ControlledForm::coherent;
};

inline ControlledChannel controlled_bidirectional(const WiretapMemoryCell& cell,
                                                  ControlledForm form = ControlledForm::coherent) {
  cell.validate();
  const int nx = cell.size(), din = cell.d_in(), db = cell.d_b(), de = cell.d_e();
  CMat u = CMat::Zero(static_cast<long>(nx) * db * de, static_cast<long>(nx) * din);
  for (int x = 0; x < nx; ++x) {
    u.block(static_cast<long>(x) * db * de, static_cast<long>(x) * din, static_cast<long>(db) * de,
            din) = cell.elements[x].V;
  }
  ControlledChannel out;
  out.form = form;
  out.isometry = IsometricExtension(u, nx * din, nx * db, de);
  KrausList kraus;
  if (form == ControlledForm::coherent) {
    kraus = kraus_from_isometry(out.isometry);
  } else {
    for (int x = 0; x < nx; ++x) {
      const KrausList kx = kraus_from_isometry(cell.elements[x]);
      const CMat px = qcore::projector(CVec(qcore::ket(nx, x)));
      for (const auto& k : kx) kraus.push_back(qcore::kron(px, k));
    }
  }
  out.channel = bidirectional_from_kraus(kraus, nx, din, nx, db);
  return out;
}

// ---- groups and covariance ----

inline GroupRep heisenberg_weyl_group(int d) {
  GroupRep g;
  for (int w = 0; w < d * d; ++w) {
    g.elements.push_back(qcore::heisenberg_weyl_index(d, w));
    g.labels.push_back("HW(" + std::to_string(w % d) + "," + std::to_string(w / d) + ")");
  }
  return g;
}

inline GroupRep pauli_group() {
  GroupRep g = heisenberg_weyl_group(2);
  g.labels = {"I", "X", "Z", "XZ"};
  return g;
}

/** σ ⊕ 1 on d+1 levels for each σ in the rep. */
inline GroupRep direct_sum_with_one(const GroupRep& rep) {
  GroupRep out;
  for (size_t k = 0; k < rep.elements.size(); ++k) {
    const int d = static_cast<int>(rep.elements[k].rows());
    CMat m = CMat::Zero(d + 1, d + 1);
    m.topLeftCorner(d, d) = rep.elements[k];
    m(d, d) = 1.0;
    out.elements.push_back(m);
    out.labels.push_back(rep.labels.empty() ? std::to_string(k) : rep.labels[k] + "+1");
  }
  return out;
}

/** Orthonormal Hermitian basis of d×d matrices. */
inline std::vector<CMat> hermitian_operator_basis(int d) {
  std::vector<CMat> out;
  const double s = 1.0 / std::sqrt(2.0);
  for (int p = 0; p < d; ++p) {
    CMat m = CMat::Zero(d, d);
    m(p, p) = 1.0;
    out.push_back(m);
  }
  for (int p = 0; p < d; ++p) {
    for (int q = p + 1; q < d; ++q) {
      CMat a = CMat::Zero(d, d), b = CMat::Zero(d, d);
      a(p, q) = a(q, p) = s;
      b(p, q) = cplx(0, s);
      b(q, p) = cplx(0, -s);
      out.push_back(a);
      out.push_back(b);
    }
  }
  return out;
}

struct CovarianceCheck {
  bool covariant = false;
  double max_residual = 0.0;
};

inline CovarianceCheck verify_covariance(const ChannelChoi& m, const GroupRep& rep_in,
                                         const GroupRep& rep_out, double tol = 1e-8) {
  if (rep_in.size() != rep_out.size() || rep_in.dim() != m.d_in || rep_out.dim() != m.d_out) {
    throw std::invalid_argument("verify_covariance: representation dimensions mismatch");
  }
  CovarianceCheck c;
  const auto basis = hermitian_operator_basis(m.d_in);
  std::vector<CMat> images;
  for (const auto& b : basis) images.push_back(apply_choi(m, b));
  for (int g = 0; g < rep_in.size(); ++g) {
    const CMat& u = rep_in.elements[g];
    const CMat& v = rep_out.elements[g];
    for (size_t k = 0; k < basis.size(); ++k) {
      const CMat lhs = apply_choi(m, CMat(u * basis[k] * u.adjoint()));
      const CMat rhs = v * images[k] * v.adjoint();
      c.max_residual = std::max(c.max_residual, qcore::trace_norm(CMat(lhs - rhs)));
    }
  }
  c.covariant = c.max_residual <= tol;
  return c;
}

struct EnvironmentRep {
  GroupRep rep;
  std::vector<CMat> w;
  double max_residual = 0.0;
  double max_unitarity_defect = 0.0;
  bool least_squares = false;
};

/** Polar factor U of A = U|A|. */
inline CMat polar_unitary(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/**
 * Environment representation W^g with U^M U^g = (V^g ⊗ W^g) U^M for the
 * canonical extension U^M = Σ_j L^j ⊗ |j⟩.
 */
inline EnvironmentRep environment_rep(const KrausList& kraus, const GroupRep& rep_in,
                                      const GroupRep& rep_out, double tol = 1e-8) {
  const ChannelChoi m = choi_from_kraus(kraus);
  const CovarianceCheck cov = verify_covariance(m, rep_in, rep_out, tol);
  if (!cov.covariant) {
    throw std::invalid_argument("environment_rep: channel is not covariant (residual " +
                                std::to_string(cov.max_residual) + ")");
  }
  const int r = static_cast<int>(kraus.size());
  CMat gram(r, r);
  for (int l = 0; l < r; ++l) {
    for (int k = 0; k < r; ++k) gram(l, k) = (kraus[l].adjoint() * kraus[k]).trace();
  }
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(gram);
  cod.setThreshold(1e-12);
  EnvironmentRep out;
  out.least_squares = cod.rank() < r;
  const IsometricExtension um = canonical_isometric_extension(kraus);
  for (int g = 0; g < rep_in.size(); ++g) {
    const CMat& u = rep_in.elements[g];
    const CMat& v = rep_out.elements[g];
    CMat w(r, r);
    for (int j = 0; j < r; ++j) {
      const CMat lhs = v.adjoint() * kraus[j] * u;
      CVec c(r);
      for (int l = 0; l < r; ++l) c(l) = (kraus[l].adjoint() * lhs).trace();
      const CVec row = cod.solve(c);
      w.row(j) = row.transpose();
    }
    if (out.least_squares) w = polar_unitary(w);
    // W|k⟩ = Σ_j w_jk |j⟩
    const CMat wg = w;
    out.w.push_back(w);
    out.rep.elements.push_back(wg);
    out.rep.labels.push_back(rep_in.labels.empty() ? std::to_string(g) : rep_in.labels[g]);
    const CMat res = um.V * u - qcore::kron(v, wg) * um.V;
    out.max_residual = std::max(out.max_residual, qcore::operator_norm(res));
    out.max_unitarity_defect =
        std::max(out.max_unitarity_defect,
                 (w.adjoint() * w - CMat::Identity(r, r)).cwiseAbs().maxCoeff());
  }
  return out;
}

/** Input groups on A′ and B′ and output unitaries indexed by g·|H| + h. */
struct BicovariantReps {
  GroupRep in_a;
  GroupRep in_b;
  std::vector<CMat> out_a;
  std::vector<CMat> out_b;

  int pairs() const { return in_a.size() * in_b.size(); }
};

struct BicovarianceCheck {
  bool bicovariant = false;
  bool one_designs = false;
  double max_residual = 0.0;
};

inline BicovarianceCheck verify_bicovariance(const BidirectionalChannel& n,
                                             const BicovariantReps& reps, double tol = 1e-8) {
  if (reps.in_a.dim() != n.d_ap || reps.in_b.dim() != n.d_bp ||
      static_cast<int>(reps.out_a.size()) != reps.pairs() ||
      static_cast<int>(reps.out_b.size()) != reps.pairs()) {
    throw std::invalid_argument("verify_bicovariance: representation shape mismatch");
  }
  BicovarianceCheck c;
  c.one_designs = reps.in_a.is_one_design() && reps.in_b.is_one_design();
  const KrausList k = bidirectional_kraus(n);
  const auto basis = hermitian_operator_basis(n.d_in());
  std::vector<CMat> images;
  for (const auto& b : basis) images.push_back(apply_kraus(k, b));
  for (int g = 0; g < reps.in_a.size(); ++g) {
    for (int h = 0; h < reps.in_b.size(); ++h) {
      const int idx = g * reps.in_b.size() + h;
      const CMat uin = qcore::kron(reps.in_a.elements[g], reps.in_b.elements[h]);
      const CMat uout = qcore::kron(reps.out_a[idx], reps.out_b[idx]);
      for (size_t b = 0; b < basis.size(); ++b) {
        const CMat lhs = apply_kraus(k, CMat(uin * basis[b] * uin.adjoint()));
        const CMat rhs = uout * images[b] * uout.adjoint();
        c.max_residual = std::max(c.max_residual, qcore::trace_norm(CMat(lhs - rhs)));
      }
    }
  }
  c.bicovariant = c.one_designs && c.max_residual <= tol;
  return c;
}

/** Factor M ≈ W ⊗ T (operator Schmidt rank one); returns the residual. */
inline double factor_tensor_product(const CMat& m, int da, int db, CMat& w, CMat& t) {
  CMat r(static_cast<long>(da) * da, static_cast<long>(db) * db);
  for (int a = 0; a < da; ++a) {
    for (int ap = 0; ap < da; ++ap) {
      for (int b = 0; b < db; ++b) {
        for (int bp = 0; bp < db; ++bp) {
          r(static_cast<long>(a) * da + ap, static_cast<long>(b) * db + bp) =
              m(static_cast<long>(a) * db + b, static_cast<long>(ap) * db + bp);
        }
      }
    }
  }
  Eigen::JacobiSVD<CMat> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double s = svd.singularValues()(0);
  w.resize(da, da);
  t.resize(db, db);
  for (int a = 0; a < da; ++a) {
    for (int ap = 0; ap < da; ++ap) w(a, ap) = svd.matrixU()(static_cast<long>(a) * da + ap, 0);
  }
  for (int b = 0; b < db; ++b) {
    for (int bp = 0; bp < db; ++bp) {
      t(b, bp) = std::conj(svd.matrixV()(static_cast<long>(b) * db + bp, 0));
    }
  }
  // unit-Frobenius factors; rescale so that both are unitary when M is
  w *= std::sqrt(static_cast<double>(da));
  t *= s / std::sqrt(static_cast<double>(da));
  return (qcore::kron(w, t) - m).cwiseAbs().maxCoeff();
}

/**
 * Output representations of a unitary bidirectional channel from the
 * factorization U (U^g ⊗ V^h) U† = W ⊗ T. Throws if some product does not
 * factor.
 */
inline BicovariantReps unitary_output_reps(const CMat& u, const GroupRep& in_a,
                                           const GroupRep& in_b, double tol = 1e-10) {
  BicovariantReps reps;
  reps.in_a = in_a;
  reps.in_b = in_b;
  const int da = in_a.dim(), db = in_b.dim();
  for (int g = 0; g < in_a.size(); ++g) {
    for (int h = 0; h < in_b.size(); ++h) {
      const CMat m = u * qcore::kron(in_a.elements[g], in_b.elements[h]) * u.adjoint();
      CMat w, t;
      if (factor_tensor_product(m, da, db, w, t) > tol) {
        throw std::invalid_argument("unitary_output_reps: conjugated element does not factor");
      }
      reps.out_a.push_back(w);
      reps.out_b.push_back(t);
    }
  }
  return reps;
}

struct CandidateResult {
  std::string name;
  double residual = 0.0;
  bool passed = false;
};

/**
 * Tries natural output representations for the controlled channel of a cell
 * whose elements are U σ^x: HW(|X|) on the register, HW(d) on B′.
 */
inline std::vector<CandidateResult> search_controlled_bicovariance(const WiretapMemoryCell& cell,
                                                                   ControlledForm form,
                                                                   double tol = 1e-8) {
  const ControlledChannel cc = controlled_bidirectional(cell, form);
  const int nx = cell.size(), d = cell.d_in(), db = cell.d_b();
  BicovariantReps base;
  base.in_a = heisenberg_weyl_group(nx);
  base.in_b = heisenberg_weyl_group(d);
  const GroupRep tb = db == d + 1 ? direct_sum_with_one(base.in_b) : base.in_b;
  struct Cand {
    std::string name;
    bool w_follows, t_follows;
  };
  const std::vector<Cand> cands{{"W=U^g, T=V^h+1", true, true},
                                {"W=U^g, T=I", true, false},
                                {"W=I, T=V^h+1", false, true},
                                {"W=I, T=I", false, false}};
  std::vector<CandidateResult> out;
  for (const auto& c : cands) {
    BicovariantReps reps = base;
    for (int g = 0; g < base.in_a.size(); ++g) {
      for (int h = 0; h < base.in_b.size(); ++h) {
        reps.out_a.push_back(c.w_follows ? base.in_a.elements[g] : CMat::Identity(nx, nx));
        reps.out_b.push_back(c.t_follows ? tb.elements[h] : CMat::Identity(db, db));
      }
    }
    const BicovarianceCheck chk = verify_bicovariance(cc.channel, reps, tol);
    out.push_back({c.name, chk.max_residual, chk.bicovariant});
  }
  return out;
}

}  // namespace biqap::channels

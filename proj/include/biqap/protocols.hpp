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
#include <stdexcept>
#include <utility>
#include <vector>

#include "biqap/channels.hpp"
#include "biqap/measures.hpp"
#include "biqap/random.hpp"

namespace biqap::protocols {

using measures::BipartiteCut;
using measures::BoundReport;

// ---- private states ----

/** γ on S_A K_A K_B S_B. */
struct PrivateState {
  int K = 0;
  int d_sa = 0;
  int d_sb = 0;
  /** U^{ij} on S_A S_B, index i·K + j. */
  std::vector<CMat> twists;
  CMat shield;
  CMat gamma;

  Dims dims() const { return {d_sa, K, K, d_sb}; }
  BipartiteCut cut() const { return BipartiteCut::split(2, 4); }
};

struct PrivacyTest {
  int K = 0;
  Dims dims;
  CMat pi;

  double pass_probability(const CMat& rho) const { return (pi * rho).trace().real(); }
  double idempotency_defect() const { return (pi * pi - pi).cwiseAbs().maxCoeff(); }
};

namespace detail {

/** U^t on S_A K_A K_B S_B. */
inline CMat twisting_unitary(int K, int d_sa, int d_sb, const std::vector<CMat>& twists) {
  const long ds = static_cast<long>(d_sa) * d_sb;
  const long n = static_cast<long>(K) * K * ds;
  // block diagonal in K_A K_B S_A S_B order
  CMat u = CMat::Zero(n, n);
  for (int ij = 0; ij < K * K; ++ij) u.block(ij * ds, ij * ds, ds, ds) = twists[ij];
  return qcore::permute_subsystems(u, {K, K, d_sa, d_sb}, {2, 0, 1, 3});
}

inline CMat key_projector(int K, int d_sa, int d_sb) {
  const CMat phi = qcore::max_entangled_state(K);
  return qcore::kron_all({CMat::Identity(d_sa, d_sa), phi, CMat::Identity(d_sb, d_sb)});
}

}  // namespace detail

inline PrivateState build_private_state(int K, const std::vector<CMat>& twists, const CMat& shield,
                                        int d_sa, int d_sb, double tol = 1e-10) {
  if (K < 1 || d_sa < 1 || d_sb < 1) throw std::invalid_argument("build_private_state: bad dims");
  if (static_cast<int>(twists.size()) != K * K) {
    throw std::invalid_argument("build_private_state: need K² twisting unitaries");
  }
  const long ds = static_cast<long>(d_sa) * d_sb;
  for (const auto& u : twists) {
    if (u.rows() != ds || u.cols() != ds ||
        (u.adjoint() * u - CMat::Identity(ds, ds)).cwiseAbs().maxCoeff() > tol) {
      throw std::invalid_argument("build_private_state: twist is not a unitary on S_A S_B");
    }
  }
  if (shield.rows() != ds || shield.cols() != ds) {
    throw std::invalid_argument("build_private_state: shield dims");
  }
  if (qcore::min_eigenvalue(qcore::hermitian_part(shield)) < -1e-9 ||
      std::abs(shield.trace().real() - 1.0) > 1e-9) {
    throw std::invalid_argument("build_private_state: shield is not a state");
  }
  PrivateState p;
  p.K = K;
  p.d_sa = d_sa;
  p.d_sb = d_sb;
  p.twists = twists;
  p.shield = shield;
  // Φ_K ⊗ θ placed on S_A K_A K_B S_B
  const CMat base = qcore::permute_subsystems(qcore::kron(qcore::max_entangled_state(K), shield),
                                              {K, K, d_sa, d_sb}, {2, 0, 1, 3});
  const CMat ut = detail::twisting_unitary(K, d_sa, d_sb, twists);
  p.gamma = qcore::hermitian_part(CMat(ut * base * ut.adjoint()));
  return p;
}

inline PrivacyTest privacy_test(const PrivateState& g) {
  const CMat ut = detail::twisting_unitary(g.K, g.d_sa, g.d_sb, g.twists);
  PrivacyTest t;
  t.K = g.K;
  t.dims = g.dims();
  t.pi = qcore::hermitian_part(CMat(ut * detail::key_projector(g.K, g.d_sa, g.d_sb) * ut.adjoint()));
  return t;
}

/**
 * Mixture of at most max_terms Haar-random pure product states across the
 * cut, with Dirichlet(1) weights.
 */
inline CMat random_separable_state(const Dims& dims, const BipartiteCut& cut, random::Rng& rng,
                                   int max_terms = 8) {
  cut.validate(static_cast<int>(dims.size()));
  long dl = 1, dr = 1;
  for (int k : cut.left) dl *= dims[k];
  for (int k : cut.right) dr *= dims[k];
  const int terms = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_terms));
  const auto w = random::dirichlet(terms, 1.0, rng);
  CMat s = CMat::Zero(dl * dr, dl * dr);
  for (int t = 0; t < terms; ++t) {
    const CVec a = random::haar_state(dl, rng);
    const CVec b = random::haar_state(dr, rng);
    s += w[t] * qcore::kron(CMat(a * a.adjoint()), CMat(b * b.adjoint()));
  }
  // back from left ⊗ right order to the original subsystem order
  std::vector<int> order = cut.left;
  order.insert(order.end(), cut.right.begin(), cut.right.end());
  Dims lr;
  for (int k : order) lr.push_back(dims[k]);
  return qcore::permute_subsystems(s, lr, qcore::inverse_permutation(order));
}

// ---- diamond distance ----

struct DiamondResult {
  /** ½‖N1 − N2‖_⋄ */
  double value = 0.0;
  double gap = 0.0;
  conic::Status status = conic::Status::optimal;
};

/** ½‖N1 − N2‖_⋄ = max Tr(J W) s.t. 0 ⪯ W ⪯ ρ ⊗ I, Tr ρ = 1, J = J1 − J2. */
inline DiamondResult diamond_distance(const channels::ChannelChoi& n1,
                                      const channels::ChannelChoi& n2, double tol = 1e-9) {
  using namespace conic;
  if (n1.d_in != n2.d_in || n1.d_out != n2.d_out) {
    throw std::invalid_argument("diamond_distance: channel dims differ");
  }
  const int din = n1.d_in, dout = n1.d_out, n = din * dout;
  const CMat j = qcore::hermitian_part(CMat(n1.J - n2.J));
  DiamondResult r;
  if (j.cwiseAbs().maxCoeff() <= 1e-14) return r;
  ConicProgram p;
  const int w = p.add_variable("W", n);
  const int rho = p.add_variable("rho", din);
  p.add_constraint("bound",
                   {{rho, tensor_identity_map({din}, {dout}, {0, 1})}, {w, scale(identity_map(n), -1.0)}},
                   Relation::psd, CMat::Zero(n, n));
  p.add_constraint("trace", {{rho, trace_map(din)}}, Relation::equal, CMat::Ones(1, 1));
  p.set_linear_objective(Sense::maximize, {{w, j}});
  const ConicSolution sol = solve(p, tol);
  if (!sol.optimal()) throw std::runtime_error("diamond_distance: solver failed");
  r.status = sol.status;
  r.gap = sol.gap;
  r.value = std::clamp(sol.primal_value, 0.0, 1.0);
  return r;
}

inline DiamondResult diamond_distance(const channels::BidirectionalChannel& n1,
                                      const channels::BidirectionalChannel& n2, double tol = 1e-9) {
  if (n1.choi_dims() != n2.choi_dims()) {
    throw std::invalid_argument("diamond_distance: channel dims differ");
  }
  const channels::ChannelChoi a(n1.point_to_point_choi(), n1.d_in(), n1.d_out());
  const channels::ChannelChoi b(n2.point_to_point_choi(), n2.d_in(), n2.d_out());
  return diamond_distance(a, b, tol);
}

// ---- teleportation simulation ----

/** E^g = (|A′|²/|G|) U^g Φ (U^g)† on A″ L_A. */
inline std::vector<CMat> teleport_povm(const channels::GroupRep& rep) {
  const int d = rep.dim();
  const CVec phi = qcore::max_entangled_vector(d, true);
  const CMat eye = CMat::Identity(d, d);
  std::vector<CMat> out;
  for (const auto& u : rep.elements) {
    const CVec v = qcore::kron(u, eye) * phi;
    out.push_back(static_cast<double>(d) * d / rep.size() * v * v.adjoint());
  }
  return out;
}

/**
 * Choi operator of the protocol that measures {E^g ⊗ F^h} on A″L_A and
 * B″L_B against θ = N(Φ ⊗ Φ) and applies W^{g,h} ⊗ T^{g,h}. The sum over
 * all branches is exact.
 */
inline channels::BidirectionalChannel teleport_simulate(const channels::BidirectionalChannel& n,
                                                        const channels::BicovariantReps& reps,
                                                        double tol = 1e-8) {
  const auto check = channels::verify_bicovariance(n, reps, tol);
  if (!check.bicovariant || !check.one_designs) {
    throw std::invalid_argument("teleport_simulate: channel is not bicovariant for these reps");
  }
  const int dap = n.d_ap, dbp = n.d_bp, da = n.d_a, db = n.d_b;
  const CMat theta = n.J / (static_cast<double>(dap) * dbp);
  // Z on S_A A″ B″ S_B ⊗ L_A A B L_B, then reorder to S_A S_B (A″ L_A)(B″ L_B) A B
  const CVec ua = qcore::max_entangled_vector(dap, false);
  const CVec ub = qcore::max_entangled_vector(dbp, false);
  const CMat ups = qcore::kron(CMat(ua * ua.adjoint()), CMat(ub * ub.adjoint()));
  const Dims zdims{dap, dap, dbp, dbp, dap, da, db, dbp};
  // subsystems: 0 S_A, 1 A″, 2 B″, 3 S_B, 4 L_A, 5 A, 6 B, 7 L_B
  const std::vector<int> perm{0, 3, 1, 4, 2, 7, 5, 6};
  const CMat z = qcore::permute_subsystems(qcore::kron(ups, theta), zdims, perm);
  const long nr = static_cast<long>(dap) * dbp;
  const long nout = static_cast<long>(da) * db;
  const CVec phia = qcore::max_entangled_vector(dap, true);
  const CVec phib = qcore::max_entangled_vector(dbp, true);
  const double ca = std::sqrt(static_cast<double>(dap) * dap / reps.in_a.size());
  const double cb = std::sqrt(static_cast<double>(dbp) * dbp / reps.in_b.size());
  CMat acc = CMat::Zero(nr * nout, nr * nout);
  const CMat eye_r = CMat::Identity(nr, nr), eye_out = CMat::Identity(nout, nout);
  for (int g = 0; g < reps.in_a.size(); ++g) {
    const CVec ea = ca * qcore::kron(reps.in_a.elements[g], CMat::Identity(dap, dap)) * phia;
    for (int h = 0; h < reps.in_b.size(); ++h) {
      const CVec eb = cb * qcore::kron(reps.in_b.elements[h], CMat::Identity(dbp, dbp)) * phib;
      const CMat bra = qcore::kron(ea, eb).adjoint();
      const CMat k = qcore::kron_all({eye_r, bra, eye_out});
      const CMat corr =
          qcore::kron_all({eye_r, reps.out_a[g * reps.in_b.size() + h],
                           reps.out_b[g * reps.in_b.size() + h]});
      acc += corr * k * z * k.adjoint() * corr.adjoint();
    }
  }
  // S_A S_B A B → S_A A B S_B
  const CMat j = qcore::permute_subsystems(acc, {dap, dbp, da, db}, {0, 2, 3, 1});
  return channels::bidirectional_from_choi(qcore::hermitian_part(j), dap, da, db, dbp);
}

// ---- resource-state bounds ----

struct ResourceBounds {
  /** R(L_A A; B L_B)_θ over PPT′. */
  BoundReport rains;
  /** E over PPT states, a relaxation of the separable REE. */
  BoundReport ree_ppt;
  CMat theta;
};

/** θ = N(Φ ⊗ Φ) on L_A A B L_B. */
inline CMat resource_state(const channels::BidirectionalChannel& n) {
  return n.J / (static_cast<double>(n.d_ap) * n.d_bp);
}

inline ResourceBounds resource_state_bounds(const channels::BidirectionalChannel& n,
                                            const channels::BicovariantReps& reps,
                                            const measures::FwConfig& cfg = {}) {
  const auto check = channels::verify_bicovariance(n, reps);
  if (!check.bicovariant || !check.one_designs) {
    throw std::invalid_argument("resource_state_bounds: channel is not bicovariant for these reps");
  }
  ResourceBounds b;
  b.theta = resource_state(n);
  const Dims dims = n.choi_dims();
  const BipartiteCut cut = BipartiteCut::split(2, 4);
  b.ree_ppt = measures::relative_entropy_of_entanglement_ppt(b.theta, dims, cut, cfg);
  measures::FwConfig rc = cfg;
  rc.start_candidates.push_back(b.ree_ppt.certificates.at("sigma"));
  b.rains = measures::rains_relative_entropy(b.theta, dims, cut, rc);
  b.rains.name = "R(resource)";
  b.ree_ppt.name = "E_PPT(resource)";
  b.ree_ppt.kind = measures::BoundKind::ppt_relaxation;
  return b;
}

}  // namespace biqap::protocols

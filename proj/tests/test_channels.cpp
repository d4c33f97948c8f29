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

#include <gtest/gtest.h>

#include <iostream>

#include "biqap/channels.hpp"
#include "biqap/random.hpp"

using namespace biqap;
using namespace biqap::channels;

namespace {

CMat unit(int d, int i, int j) {
  CMat m = CMat::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

/** Largest action difference of two Kraus sets over the matrix-unit basis. */
double action_gap(const KrausList& a, const KrausList& b) {
  const int d = static_cast<int>(a.front().cols());
  double w = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      w = std::max(w, max_abs(apply_kraus(a, unit(d, i, j)) - apply_kraus(b, unit(d, i, j))));
    }
  }
  return w;
}

CMat ref_apply(const KrausList& k, const CMat& rho, int d_ref) {
  CMat out = CMat::Zero(d_ref * k.front().rows(), d_ref * k.front().rows());
  for (const auto& op : k) {
    const CMat big = qcore::kron(CMat::Identity(d_ref, d_ref), op);
    out += big * rho * big.adjoint();
  }
  return out;
}

CMat pauli_x() { return qcore::heisenberg_weyl(2, 1, 0); }
CMat pauli_z() { return qcore::heisenberg_weyl(2, 0, 1); }
CMat eye2() { return CMat::Identity(2, 2); }

}  // namespace

TEST(Choi, IdentityIsUnnormalizedMaxEntangled) {
  for (int d : {2, 3}) {
    const CVec u = qcore::max_entangled_vector(d, false);
    EXPECT_LE(max_abs(identity_channel(d).J - u * u.adjoint()), 1e-14);
    EXPECT_LE(max_abs(choi_from_kraus({CMat::Identity(d, d)}).J - u * u.adjoint()), 1e-14);
  }
}

TEST(Choi, DephasingKeepsDiagonal) {
  const ChannelChoi c = choi_from_kraus({std::sqrt(0.5) * eye2(), std::sqrt(0.5) * pauli_z()});
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const CMat expect = i == j ? unit(2, i, j) : CMat::Zero(2, 2);
      EXPECT_LE(max_abs(apply_choi(c, unit(2, i, j)) - expect), 1e-14);
    }
  }
}

TEST(Choi, RoundTripRandomChannels) {
  random::Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    const int din = 2 + t % 2, dout = 2 + (t / 2) % 3;
    const auto k = random::random_channel_kraus(din, dout, 2 + t % 4, rng);
    const ChannelChoi c = choi_from_kraus(k);
    EXPECT_LE(c.cp_defect(), 1e-9);
    EXPECT_LE(c.tp_defect(), 1e-9);
    EXPECT_LE(action_gap(k, kraus_from_choi(c)), 1e-9);
  }
}

TEST(Choi, RejectsInvalidInput) {
  EXPECT_THROW(choi_from_kraus({0.5 * eye2()}), std::invalid_argument);
  EXPECT_THROW(ChannelChoi(CMat::Identity(4, 4), 2, 2), std::invalid_argument);
  EXPECT_THROW(ChannelChoi(CMat::Identity(3, 3), 2, 2), std::invalid_argument);
}

TEST(ApplyChoi, MatchesKrausWithReference) {
  random::Rng rng(12);
  const auto c = identity_channel(2);
  const CMat r = random::random_density(4, rng);
  EXPECT_LE(max_abs(apply_choi(c, r, 2) - r), 1e-13);
  for (int t = 0; t < 100; ++t) {
    const int dref = 1 + t % 3;
    const auto k = random::random_channel_kraus(2, 3, 1 + t % 4, rng);
    const CMat rho = random::random_density(2 * dref, rng);
    EXPECT_LE(max_abs(apply_choi(choi_from_kraus(k), rho, dref) - ref_apply(k, rho, dref)), 1e-12);
  }
  EXPECT_THROW(apply_choi(c, CMat::Identity(3, 3)), std::invalid_argument);
}

TEST(ApplyChoi, ErasureOneGivesFlag) {
  random::Rng rng(13);
  for (int d : {2, 3}) {
    const CMat rho = random::random_density(d, rng);
    CMat flag = CMat::Zero(d + 1, d + 1);
    flag(d, d) = 1.0;
    EXPECT_LE(max_abs(apply_choi(erasure_channel(d, 1.0), rho) - flag), 1e-13);
  }
}

TEST(ApplyKrausOn, MiddleSubsystem) {
  random::Rng rng(14);
  const CMat rho = random::random_density(12, rng);
  const auto k = random::random_channel_kraus(3, 2, 2, rng);
  KrausList big;
  for (const auto& op : k) {
    big.push_back(qcore::kron_all({eye2(), op, eye2()}));
  }
  EXPECT_LE(max_abs(apply_kraus_on(k, rho, {2, 3, 2}, {1}, {2}) - apply_kraus(big, rho)), 1e-13);
}

TEST(Isometry, CanonicalExtensionRecoversChannel) {
  random::Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    const auto k = random::random_channel_kraus(2, 3, 1 + t % 4, rng);
    const IsometricExtension v = canonical_isometric_extension(k);
    EXPECT_LE(v.isometry_defect(), 1e-12);
    EXPECT_LE(action_gap(k, kraus_from_isometry(v)), 1e-12);
    // complement of complement acts like the original
    const IsometricExtension vc = canonical_isometric_extension(complementary_kraus(v));
    EXPECT_LE(action_gap(k, complementary_kraus(vc)), 1e-9);
  }
}

TEST(Isometry, UnitaryComplementIsConstant) {
  random::Rng rng(16);
  const CMat u = random::haar_unitary(3, rng);
  const ChannelChoi comp = complementary_channel(canonical_isometric_extension({u}));
  for (int t = 0; t < 5; ++t) {
    const CMat out = apply_choi(comp, random::random_density(3, rng));
    EXPECT_NEAR(std::abs(out(0, 0)), 1.0, 1e-12);
  }
}

TEST(Erasure, ComplementIsErasureOneMinusQ) {
  for (int d : {2, 3}) {
    for (double q : {0.0, 0.3, 0.8}) {
      const IsometricExtension u = erasure_isometry(d, q);
      EXPECT_LE(action_gap(kraus_from_isometry(u), erasure_kraus(d, q)), 1e-12);
      EXPECT_LE(action_gap(complementary_kraus(u), erasure_kraus(d, 1.0 - q)), 1e-12);
    }
  }
}

TEST(Erasure, CellMarginals) {
  random::Rng rng(17);
  for (int d : {2, 3}) {
    const WiretapMemoryCell c0 = erasure_wiretap_cell(d, 0.0);
    const WiretapMemoryCell c1 = erasure_wiretap_cell(d, 1.0);
    ASSERT_EQ(c0.size(), d * d);
    EXPECT_EQ(c0.d_b(), d + 1);
    EXPECT_EQ(c0.d_e(), d + 1);
    for (int x = 0; x < d * d; ++x) {
      const CVec psi = random::haar_state(d, rng);
      const CMat s = qcore::heisenberg_weyl_index(d, x);
      CMat expect = CMat::Zero(d + 1, d + 1);
      expect.topLeftCorner(d, d) = s * psi * psi.adjoint() * s.adjoint();
      const CVec out0 = c0.elements[x].V * psi;
      EXPECT_LE(max_abs(qcore::partial_trace(CMat(out0 * out0.adjoint()), {d + 1, d + 1}, {0}) -
                        expect),
                1e-12);
      const CVec out1 = c1.elements[x].V * psi;
      const CMat b1 = qcore::partial_trace(CMat(out1 * out1.adjoint()), {d + 1, d + 1}, {0});
      EXPECT_NEAR(b1(d, d).real(), 1.0, 1e-12);
    }
  }
  EXPECT_THROW(erasure_wiretap_cell(1, 0.3), std::out_of_range);
  EXPECT_THROW(erasure_wiretap_cell(2, 1.3), std::out_of_range);
}

TEST(Erasure, IsometryAndBESymmetry) {
  random::Rng rng(18);
  for (int d : {2, 3}) {
    const double q = 0.3;
    const auto cell = erasure_wiretap_cell(d, q);
    const auto flip = erasure_wiretap_cell(d, 1.0 - q);
    for (int x = 0; x < cell.size(); ++x) {
      const CMat& v = cell.elements[x].V;
      EXPECT_LE(max_abs(v.adjoint() * v - CMat::Identity(d, d)), 1e-12);
      const CMat rho = random::random_density(d, rng);
      const CMat out = v * rho * v.adjoint();
      const CMat out_flip = flip.elements[x].V * rho * flip.elements[x].V.adjoint();
      const CMat e_marg = qcore::partial_trace(out, {d + 1, d + 1}, {1});
      const CMat b_marg_flip = qcore::partial_trace(out_flip, {d + 1, d + 1}, {0});
      EXPECT_LE(max_abs(e_marg - b_marg_flip), 1e-12);
    }
  }
}

TEST(Bidirectional, LocalProductMatchesKron) {
  random::Rng rng(19);
  const auto ka = random::random_channel_kraus(2, 2, 2, rng);
  const auto kb = random::random_channel_kraus(2, 3, 2, rng);
  const BidirectionalChannel n = bidirectional_from_local(choi_from_kraus(ka), choi_from_kraus(kb));
  KrausList prod;
  for (const auto& a : ka) {
    for (const auto& b : kb) prod.push_back(qcore::kron(a, b));
  }
  const BidirectionalChannel m = bidirectional_from_kraus(prod, 2, 2, 2, 3);
  EXPECT_LE(max_abs(n.J - m.J), 1e-12);
  EXPECT_LE(n.tp_defect(), 1e-12);
  const CMat rho = random::random_density(16, rng);
  KrausList full;
  for (const auto& k : prod) full.push_back(qcore::kron_all({eye2(), k, eye2()}));
  EXPECT_LE(max_abs(apply_bidirectional(n, rho, 2, 2) -
                    qcore::permute_subsystems(apply_kraus(full, rho), {2, 2, 3, 2}, {0, 1, 2, 3})),
            1e-12);
}

TEST(Controlled, SingleElementReducesToChannel) {
  WiretapMemoryCell cell;
  cell.elements.push_back(erasure_isometry(2, 0.4));
  const ControlledChannel cc = controlled_bidirectional(cell);
  random::Rng rng(20);
  const CMat rho = random::random_density(2, rng);
  const CMat out = apply_bidirectional(cc.channel, rho, 1, 1);
  EXPECT_LE(max_abs(out - apply_kraus(erasure_kraus(2, 0.4), rho)), 1e-12);
}

TEST(Controlled, ClassicalInputAndTracePreservation) {
  random::Rng rng(21);
  const auto cell = erasure_wiretap_cell(2, 0.3);
  for (auto form : {ControlledForm::coherent, ControlledForm::dephased}) {
    const ControlledChannel cc = controlled_bidirectional(cell, form);
    EXPECT_LE(cc.channel.tp_defect(), 1e-12);
    EXPECT_LE(cc.channel.cp_defect(), 1e-12);
    EXPECT_LE(cc.isometry.isometry_defect(), 1e-12);
    EXPECT_EQ(cc.channel.J.rows(), 96);
    for (int x = 0; x < 4; ++x) {
      const CMat rho = random::random_density(2, rng);
      const CMat px = unit(4, x, x);
      const CMat out = apply_bidirectional(cc.channel, qcore::kron(px, rho), 1, 1);
      const CMat mx = apply_kraus(kraus_from_isometry(cell.elements[x]), rho);
      EXPECT_LE(max_abs(out - qcore::kron(px, mx)), 1e-12);
    }
  }
  // the forms differ on register coherences
  const CVec plus = CVec::Ones(4) / 2.0;
  const CMat in = qcore::kron(qcore::projector(plus), qcore::maximally_mixed(2));
  const CMat a = apply_bidirectional(controlled_bidirectional(cell).channel, in, 1, 1);
  const CMat b =
      apply_bidirectional(controlled_bidirectional(cell, ControlledForm::dephased).channel, in, 1, 1);
  EXPECT_GT(max_abs(a - b), 1e-3);
}

TEST(Groups, OneDesigns) {
  random::Rng rng(22);
  EXPECT_TRUE(pauli_group().is_one_design(1e-10));
  const GroupRep hw3 = heisenberg_weyl_group(3);
  EXPECT_EQ(hw3.size(), 9);
  EXPECT_LE(hw3.unitarity_defect(), 1e-12);
  EXPECT_TRUE(hw3.is_one_design(1e-10));
  const CMat rho = random::random_density(3, rng);
  CMat twirl = CMat::Zero(3, 3);
  for (const auto& u : hw3.elements) twirl += u * rho * u.adjoint() / 9.0;
  EXPECT_LE(max_abs(twirl - qcore::maximally_mixed(3)), 1e-10);
  GroupRep phases;
  for (int l = 0; l < 3; ++l) phases.elements.push_back(qcore::phase_operator(3, l));
  EXPECT_FALSE(phases.is_one_design());
}

TEST(Covariance, CnotPauliRelations) {
  const CMat cnot = cnot_matrix();
  const CMat x = pauli_x(), z = pauli_z(), i = eye2();
  auto rel = [&](const CMat& in, const CMat& out) {
    return max_abs(cnot * in - out * cnot);
  };
  EXPECT_LE(rel(qcore::kron(x, i), qcore::kron(x, x)), 1e-14);
  EXPECT_LE(rel(qcore::kron(i, x), qcore::kron(i, x)), 1e-14);
  EXPECT_LE(rel(qcore::kron(z, i), qcore::kron(z, i)), 1e-14);
  EXPECT_LE(rel(qcore::kron(i, z), qcore::kron(z, z)), 1e-14);
  EXPECT_LE(rel(qcore::kron(x, x), qcore::kron(x, i)), 1e-14);
  EXPECT_LE(rel(qcore::kron(z, z), qcore::kron(i, z)), 1e-14);
}

TEST(Covariance, ErasureAndDepolarizing) {
  for (int d : {2, 3}) {
    const GroupRep hw = heisenberg_weyl_group(d);
    const auto e = verify_covariance(erasure_channel(d, 0.35), hw, direct_sum_with_one(hw));
    EXPECT_TRUE(e.covariant);
    EXPECT_LE(e.max_residual, 1e-12);
    EXPECT_TRUE(verify_covariance(depolarizing_channel(d, 0.4), hw, hw).covariant);
  }
  random::Rng rng(23);
  const auto k = random::random_channel_kraus(2, 2, 2, rng);
  EXPECT_FALSE(verify_covariance(choi_from_kraus(k), pauli_group(), pauli_group()).covariant);
}

TEST(EnvironmentRep, UnitaryGivesPhase) {
  random::Rng rng(24);
  const CMat u = random::haar_unitary(2, rng);
  GroupRep out;
  for (const auto& g : pauli_group().elements) out.elements.push_back(u * g * u.adjoint());
  const EnvironmentRep env = environment_rep({u}, pauli_group(), out);
  for (const auto& w : env.w) {
    ASSERT_EQ(w.rows(), 1);
    EXPECT_NEAR(std::abs(w(0, 0)), 1.0, 1e-12);
  }
  EXPECT_LE(env.max_residual, 1e-12);
}

TEST(EnvironmentRep, ErasureHeisenbergWeyl) {
  for (int d : {2, 3}) {
    const GroupRep hw = heisenberg_weyl_group(d);
    const EnvironmentRep env = environment_rep(erasure_kraus(d, 0.3), hw, direct_sum_with_one(hw));
    EXPECT_FALSE(env.least_squares);
    EXPECT_LE(env.max_residual, 1e-8);
    EXPECT_LE(env.max_unitarity_defect, 1e-8);
  }
}

TEST(EnvironmentRep, DegenerateKrausUsesLeastSquares) {
  // duplicated Kraus operators are linearly dependent
  KrausList k{std::sqrt(0.25) * eye2(), std::sqrt(0.25) * eye2(), std::sqrt(0.5) * pauli_z()};
  const EnvironmentRep env = environment_rep(k, pauli_group(), pauli_group());
  EXPECT_TRUE(env.least_squares);
  EXPECT_LE(env.max_unitarity_defect, 1e-8);
}

TEST(EnvironmentRep, RejectsNonCovariant) {
  random::Rng rng(25);
  const auto k = random::random_channel_kraus(2, 2, 2, rng);
  EXPECT_THROW(environment_rep(k, pauli_group(), pauli_group()), std::invalid_argument);
}

TEST(Bicovariance, CnotSwapIdentity) {
  const GroupRep p = pauli_group();
  const auto cnot = verify_bicovariance(bidirectional_from_unitary(cnot_matrix(), 2, 2),
                                        unitary_output_reps(cnot_matrix(), p, p));
  EXPECT_TRUE(cnot.bicovariant);
  const CMat sw = swap_matrix(2);
  EXPECT_TRUE(verify_bicovariance(bidirectional_from_unitary(sw, 2, 2),
                                  unitary_output_reps(sw, p, p))
                  .bicovariant);
  const CMat id = CMat::Identity(4, 4);
  EXPECT_TRUE(
      verify_bicovariance(bidirectional_from_unitary(id, 2, 2), unitary_output_reps(id, p, p))
          .bicovariant);
  // SWAP with unswapped output reps fails
  const BicovariantReps wrong = unitary_output_reps(id, p, p);
  EXPECT_FALSE(verify_bicovariance(bidirectional_from_unitary(sw, 2, 2), wrong).bicovariant);
}

TEST(Bicovariance, ControlledErasureCandidates) {
  const auto cell = erasure_wiretap_cell(2, 0.3);
  for (auto form : {ControlledForm::coherent, ControlledForm::dephased}) {
    for (const auto& r : search_controlled_bicovariance(cell, form)) {
      std::cout << (form == ControlledForm::coherent ? "coherent " : "dephased ") << r.name
                << " residual=" << r.residual << (r.passed ? " pass" : " fail") << "\n";
      EXPECT_TRUE(std::isfinite(r.residual));
    }
  }
}

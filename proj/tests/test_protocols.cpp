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

#include "biqap/protocols.hpp"

using namespace biqap;
using namespace biqap::protocols;
using channels::BidirectionalChannel;

namespace {

BidirectionalChannel unitary_bi(const CMat& u) { return channels::bidirectional_from_unitary(u, 2, 2); }

channels::BicovariantReps pauli_reps(const CMat& u) {
  return channels::unitary_output_reps(u, channels::pauli_group(), channels::pauli_group());
}

/** p·CNOT + (1 − p)·replace with π. */
BidirectionalChannel noisy_cnot(double p) {
  const BidirectionalChannel c = unitary_bi(channels::cnot_matrix());
  const CMat j = p * c.J + (1.0 - p) * CMat::Identity(16, 16) / 4.0;
  return channels::bidirectional_from_choi(j, 2, 2, 2, 2);
}

double choi_trace_distance(const BidirectionalChannel& a, const BidirectionalChannel& b) {
  const double norm = static_cast<double>(a.d_in());
  return 0.5 * qcore::trace_norm(CMat((a.J - b.J) / norm));
}

std::vector<CMat> random_twists(int k, int ds, random::Rng& rng) {
  std::vector<CMat> t;
  for (int i = 0; i < k * k; ++i) t.push_back(random::haar_unitary(ds, rng));
  return t;
}

}  // namespace

TEST(PrivateState, TrivialTwist) {
  random::Rng rng(1);
  const CVec s = random::haar_state(4, rng);
  const CMat theta = s * s.adjoint();
  const std::vector<CMat> id(4, CMat::Identity(4, 4));
  const PrivateState g = build_private_state(2, id, theta, 2, 2);
  // Φ_K ⊗ θ assembled independently on S_A K_A K_B S_B
  const CMat expect = qcore::permute_subsystems(qcore::kron(qcore::max_entangled_state(2), theta),
                                                {2, 2, 2, 2}, {2, 0, 1, 3});
  EXPECT_LE((g.gamma - expect).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(privacy_test(g).pass_probability(g.gamma), 1.0, 1e-12);
}

TEST(PrivateState, RandomTwistsPassTheirTest) {
  random::Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const int k = 2 + t % 2;
    const CMat theta = random::random_density(4, rng);
    const PrivateState g = build_private_state(k, random_twists(k, 4, rng), theta, 2, 2);
    EXPECT_NEAR(g.gamma.trace().real(), 1.0, 1e-12);
    EXPECT_GE(qcore::min_eigenvalue(g.gamma), -1e-12);
    const PrivacyTest pt = privacy_test(g);
    EXPECT_LE(pt.idempotency_defect(), 1e-12);
    EXPECT_NEAR(pt.pi.trace().real(), 4.0, 1e-10);
    EXPECT_NEAR(pt.pass_probability(g.gamma), 1.0, 1e-10);
  }
}

TEST(PrivateState, RejectsNonUnitaryTwist) {
  std::vector<CMat> tw(4, CMat::Identity(4, 4));
  tw[2](0, 0) = 2.0;
  EXPECT_THROW(build_private_state(2, tw, qcore::maximally_mixed(4), 2, 2), std::invalid_argument);
  EXPECT_THROW(build_private_state(2, {CMat::Identity(4, 4)}, qcore::maximally_mixed(4), 2, 2),
               std::invalid_argument);
}

TEST(PrivateState, SeparableStatesPassAtMostOneOverK) {
  random::Rng rng(3);
  for (int k : {2, 3}) {
    const PrivateState g =
        build_private_state(k, random_twists(k, 4, rng), random::random_density(4, rng), 2, 2);
    const PrivacyTest pt = privacy_test(g);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const CMat s = random_separable_state(g.dims(), g.cut(), rng);
      worst = std::max(worst, pt.pass_probability(s));
    }
    EXPECT_LE(worst, 1.0 / k + 1e-9);
  }
}

TEST(PrivateState, SeparableSamplerIsPpt) {
  random::Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const CMat s = random_separable_state({2, 2, 2, 2}, BipartiteCut::split(2, 4), rng);
    EXPECT_NEAR(s.trace().real(), 1.0, 1e-12);
    EXPECT_GE(qcore::min_eigenvalue(qcore::partial_transpose(s, {2, 2, 2, 2}, {2, 3})), -1e-12);
  }
}

TEST(PrivateState, ApproximatePrivateStates) {
  random::Rng rng(5);
  const CVec v = random::haar_state(4, rng);
  const PrivateState g = build_private_state(2, random_twists(2, 4, rng), v * v.adjoint(), 2, 2);
  const PrivacyTest pt = privacy_test(g);
  const CMat pi = qcore::maximally_mixed(16);
  for (double e : {0.0, 0.01, 0.1, 0.3, 0.7}) {
    const CMat noisy = (1.0 - e) * g.gamma + e * pi;
    const double eps = 1.0 - qcore::fidelity(noisy, g.gamma);
    EXPECT_GE(pt.pass_probability(noisy), 1.0 - eps - 1e-10);
  }
  for (int t = 0; t < 20; ++t) {
    const double e = 0.5 * random::uniform(rng);
    const CMat noisy = (1.0 - e) * g.gamma + e * random::random_density(16, rng);
    EXPECT_GE(pt.pass_probability(noisy), 1.0 - (1.0 - qcore::fidelity(noisy, g.gamma)) - 1e-10);
  }
}

TEST(Diamond, SelfAndDepolarizing) {
  random::Rng rng(6);
  const auto k = random::random_channel_kraus(2, 2, 3, rng);
  const auto n = channels::choi_from_kraus(k);
  EXPECT_NEAR(diamond_distance(n, n).value, 0.0, 1e-9);
  const auto id = channels::identity_channel(2);
  const auto dep = channels::depolarizing_channel(2, 1.0);
  // ½‖(id ⊗ (id − dep))(ψ_p)‖₁ over ψ_p = √p|00⟩ + √(1−p)|11⟩
  double oracle = 0.0;
  for (int s = 0; s <= 1000; ++s) {
    const double p = s / 1000.0;
    CVec psi = CVec::Zero(4);
    psi(0) = std::sqrt(p);
    psi(3) = std::sqrt(1.0 - p);
    const CMat rho = psi * psi.adjoint();
    const CMat diff = rho - qcore::kron(qcore::partial_trace(rho, {2, 2}, {0}), qcore::maximally_mixed(2));
    oracle = std::max(oracle, 0.5 * qcore::trace_norm(diff));
  }
  EXPECT_NEAR(oracle, 0.75, 1e-12);
  EXPECT_NEAR(diamond_distance(id, dep).value, oracle, 1e-7);
}

TEST(Diamond, SandwichedByChoiDistances) {
  random::Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const int d = 2 + t % 2;
    const auto a = channels::choi_from_kraus(random::random_channel_kraus(d, d, 2, rng));
    const auto b = channels::choi_from_kraus(random::random_channel_kraus(d, d, 2, rng));
    const double dd = diamond_distance(a, b).value;
    const double choi = 0.5 * qcore::trace_norm(CMat(a.J - b.J));
    EXPECT_GE(dd, choi / d - 1e-7);
    EXPECT_LE(dd, choi + 1e-7);
    EXPECT_GE(dd, 0.0);
    EXPECT_LE(dd, 1.0);
    // any entangled probe is a lower bound
    for (int s = 0; s < 5; ++s) {
      const CVec psi = random::haar_state(d * d, rng);
      const CMat rho = psi * psi.adjoint();
      const CMat diff = channels::apply_choi(a.J, d, d, rho, d) - channels::apply_choi(b.J, d, d, rho, d);
      EXPECT_LE(0.5 * qcore::trace_norm(diff), dd + 1e-7);
    }
  }
}

TEST(Diamond, RejectsMismatchedDims) {
  EXPECT_THROW(diamond_distance(channels::identity_channel(2), channels::identity_channel(3)),
               std::invalid_argument);
}

TEST(Teleportation, PovmCompleteness) {
  for (int d : {2, 3}) {
    const auto e = teleport_povm(channels::heisenberg_weyl_group(d));
    CMat sum = CMat::Zero(d * d, d * d);
    for (const auto& x : e) {
      sum += x;
      EXPECT_GE(qcore::min_eigenvalue(x), -1e-12);
    }
    EXPECT_LE((sum - CMat::Identity(d * d, d * d)).cwiseAbs().maxCoeff(), 1e-10);
  }
  // {I, Z} is not a one-design and its E^g do not sum to I
  channels::GroupRep zgroup;
  zgroup.elements = {CMat::Identity(2, 2), qcore::phase_operator(2, 1)};
  CMat sum = CMat::Zero(4, 4);
  for (const auto& x : teleport_povm(zgroup)) sum += x;
  EXPECT_GT((sum - CMat::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Teleportation, SimulatesBicovariantChannels) {
  const std::vector<std::pair<std::string, BidirectionalChannel>> cases{
      {"id", unitary_bi(CMat::Identity(4, 4))},
      {"cnot", unitary_bi(channels::cnot_matrix())},
      {"swap", unitary_bi(channels::swap_matrix(2))},
      {"noisy-cnot", noisy_cnot(0.6)},
  };
  const auto reps = pauli_reps(channels::cnot_matrix());
  for (const auto& [name, n] : cases) {
    SCOPED_TRACE(name);
    const auto r = name == "noisy-cnot" ? reps : pauli_reps(
        name == "id" ? CMat(CMat::Identity(4, 4)) : name == "cnot" ? channels::cnot_matrix()
                                                                   : channels::swap_matrix(2));
    const BidirectionalChannel sim = teleport_simulate(n, r);
    EXPECT_LE(choi_trace_distance(sim, n), 1e-8);
    EXPECT_LE(sim.tp_defect(), 1e-8);
    EXPECT_LE(sim.cp_defect(), 1e-8);
    EXPECT_LE(diamond_distance(n, sim).value, 1e-6);
  }
}

TEST(Teleportation, RejectsNonBicovariant) {
  random::Rng rng(8);
  const BidirectionalChannel n = unitary_bi(random::haar_unitary(4, rng));
  EXPECT_THROW(teleport_simulate(n, pauli_reps(channels::cnot_matrix())), std::invalid_argument);
}

TEST(ResourceBounds, IdentityAndSwap) {
  const auto id = resource_state_bounds(unitary_bi(CMat::Identity(4, 4)),
                                        pauli_reps(CMat::Identity(4, 4)));
  EXPECT_LE(id.rains.value_bits, 1e-6);
  EXPECT_LE(id.ree_ppt.value_bits, 1e-6);
  EXPECT_EQ(id.ree_ppt.kind, measures::BoundKind::ppt_relaxation);

  const CMat phi = qcore::max_entangled_state(2);
  const double single =
      measures::rains_relative_entropy(phi, {2, 2}, BipartiteCut::split(1, 2)).value_bits;
  const auto sw = resource_state_bounds(unitary_bi(channels::swap_matrix(2)),
                                        pauli_reps(channels::swap_matrix(2)));
  EXPECT_NEAR(sw.rains.value_bits, 2.0 * single, 2e-3);
  EXPECT_NEAR(sw.rains.value_bits, 2.0, 2e-3);
  EXPECT_LE(sw.rains.value_bits, sw.ree_ppt.value_bits + 1e-6);
}

TEST(ResourceBounds, CnotAgainstMaxRains) {
  const BidirectionalChannel n = unitary_bi(channels::cnot_matrix());
  const auto b = resource_state_bounds(n, pauli_reps(channels::cnot_matrix()));
  const double rmax = measures::gamma_bidirectional(n).value_bits;
  std::cout << "CNOT resource: R = " << b.rains.value_bits << " (gap " << b.rains.gap
            << "), E_PPT = " << b.ree_ppt.value_bits << ", R2to2_max = " << rmax << " -> "
            << (std::abs(b.rains.value_bits - rmax) <= 1e-6
                ? "equal"
                : (b.rains.value_bits < rmax ? "resource Rains smaller" : "max-Rains smaller"))
            << "\n";
  EXPECT_LE(b.rains.value_bits, rmax + 1e-6);
  EXPECT_LE(b.rains.value_bits, b.ree_ppt.value_bits + 1e-6);
  // transpose on either side of the cut
  const CMat theta = resource_state(n);
  const auto flipped =
      measures::rains_relative_entropy(theta, n.choi_dims(), BipartiteCut{{2, 3}, {0, 1}});
  EXPECT_NEAR(flipped.value_bits, b.rains.value_bits, b.rains.gap + flipped.gap + 1e-6);
}

TEST(ResourceBounds, RejectsNonBicovariant) {
  random::Rng rng(9);
  EXPECT_THROW(resource_state_bounds(unitary_bi(random::haar_unitary(4, rng)),
                                     pauli_reps(channels::cnot_matrix())),
               std::invalid_argument);
}

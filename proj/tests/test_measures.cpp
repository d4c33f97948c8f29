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

#include "biqap/measures.hpp"

using namespace biqap;
using namespace biqap::measures;
using channels::BidirectionalChannel;

namespace {

const BipartiteCut kCut2 = BipartiteCut::split(1, 2);
const BipartiteCut kCut4 = BipartiteCut::split(2, 4);

CMat isotropic(int d, double f) {
  const CMat phi = qcore::max_entangled_state(d);
  const CMat eye = CMat::Identity(d * d, d * d);
  return f * phi + (1.0 - f) * (eye - phi) / (d * d - 1.0);
}

CMat werner(double p) {
  const CMat f = channels::swap_matrix(2);
  const CMat eye = CMat::Identity(4, 4);
  return p * (eye - f) / 2.0 + (1.0 - p) * (eye + f) / 6.0;
}

double pt_min_eig(const CMat& rho, int d) {
  return qcore::min_eigenvalue(qcore::partial_transpose(rho, {d, d}, {1}));
}

bool in_ppt_prime(const CMat& s, int d) {
  return qcore::min_eigenvalue(s) >= -1e-12 &&
         qcore::trace_norm(qcore::partial_transpose(s, {d, d}, {1})) <= 1.0 + 1e-12;
}

BidirectionalChannel unitary_bi(const CMat& u) { return channels::bidirectional_from_unitary(u, 2, 2); }

/** min over a one-parameter family of feasible σ of D(ρ‖σ). */
double scan_min(const CMat& rho, const std::function<CMat(double)>& family, int d) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 20000; ++k) {
    const CMat s = family(k / 20000.0);
    if (!in_ppt_prime(s, d)) continue;
    const auto v = divergences::relative_entropy(rho, s);
    if (!v.infinite) best = std::min(best, v.value);
  }
  return best;
}

}  // namespace

TEST(WState, ProductAndMaximallyEntangled) {
  random::Rng rng(1);
  const CMat prod = qcore::kron(random::random_density(2, rng), random::random_density(2, rng));
  const auto p = w_state(prod, {2, 2}, kCut2);
  EXPECT_NEAR(p.linear_value, 1.0, 1e-7);
  EXPECT_NEAR(p.value_bits, 0.0, 1e-7);
  for (int d : {2, 3}) {
    const CMat phi = qcore::max_entangled_state(d);
    // upper certificate: C − D = T_B(Φ), lower certificate: X = dΦ
    const CMat f = qcore::partial_transpose(phi, {d, d}, {1});
    const CMat eye = CMat::Identity(d * d, d * d);
    const CMat c = (eye / d + f) / 2.0, dd = (eye / d - f) / 2.0;
    EXPECT_GE(qcore::min_eigenvalue(c), -1e-12);
    EXPECT_GE(qcore::min_eigenvalue(dd), -1e-12);
    EXPECT_GE(qcore::min_eigenvalue(qcore::partial_transpose(CMat(c - dd), {d, d}, {1}) - phi),
              -1e-12);
    const double upper = (c + dd).trace().real();
    const CMat x = d * phi;
    EXPECT_LE(qcore::operator_norm(qcore::partial_transpose(x, {d, d}, {1})), 1.0 + 1e-12);
    const double lower = (phi * x).trace().real();
    const auto w = w_state(phi, {d, d}, kCut2);
    ASSERT_EQ(w.status, conic::Status::optimal);
    EXPECT_LE(w.linear_value, upper + 1e-7);
    EXPECT_GE(w.linear_value, lower - 1e-7);
    EXPECT_NEAR(w.value_bits, std::log2(d), 1e-7);
  }
}

TEST(WState, IsotropicAtPptBoundary) {
  for (int d : {2, 3}) {
    // bisection on the partial-transpose spectrum
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (pt_min_eig(isotropic(d, mid), d) >= 0.0 ? lo : hi) = mid;
    }
    EXPECT_NEAR(lo, 1.0 / d, 1e-12);
    EXPECT_NEAR(w_state(isotropic(d, lo), {d, d}, kCut2).value_bits, 0.0, 1e-6);
    EXPECT_GT(w_state(isotropic(d, lo + 0.1), {d, d}, kCut2).value_bits, 1e-3);
  }
}

TEST(WState, LocalUnitaryInvariance) {
  random::Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const CMat rho = random::random_density(4, rng);
    const CMat u = qcore::kron(random::haar_unitary(2, rng), random::haar_unitary(2, rng));
    EXPECT_NEAR(w_state(rho, {2, 2}, kCut2).value_bits,
                w_state(CMat(u * rho * u.adjoint()), {2, 2}, kCut2).value_bits, 1e-7);
  }
}

TEST(WState, RejectsBadCut) {
  const CMat rho = qcore::maximally_mixed(4);
  EXPECT_THROW(w_state(rho, {2, 2}, BipartiteCut{{0}, {0}}), std::invalid_argument);
  EXPECT_THROW(w_state(rho, {2, 2}, BipartiteCut{{0}, {}}), std::invalid_argument);
}

TEST(GammaChannel, IdentityAndDepolarizing) {
  for (int d : {2, 3}) {
    const auto id = channels::identity_channel(d);
    // V − Y = T_B(Υ) = F gives the upper certificate d
    const auto g = gamma_channel(id);
    ASSERT_EQ(g.status, conic::Status::optimal);
    EXPECT_NEAR(g.linear_value, d, 1e-6);
    EXPECT_NEAR(gamma_channel(id, GammaForm::primal).linear_value, d, 1e-6);
    EXPECT_NEAR(gamma_channel(channels::depolarizing_channel(d, 1.0)).value_bits, 0.0, 1e-6);
  }
}

TEST(GammaChannel, ErasureMatchesTrivialBidirectionalExtension) {
  const auto k = channels::erasure_kraus(2, 0.5);
  const auto g = gamma_channel(channels::choi_from_kraus(k));
  // A′ → B with trivial A and B′
  const BidirectionalChannel n = channels::bidirectional_from_kraus(k, 2, 1, 1, 3);
  const auto both = gamma_bidirectional_both(n);
  EXPECT_NEAR(g.value_bits, both.dual.value_bits, 1e-6);
  EXPECT_NEAR(g.value_bits, both.primal.value_bits, 1e-6);
  // erasure: Γ = 2(1 − q) + q = 1.5 at q = 1/2, 1 − q ebits of quantum capacity
  EXPECT_NEAR(g.linear_value, 1.5, 1e-6);
}

TEST(GammaChannel, OneSidedBidirectionalReducesToPointToPoint) {
  random::Rng rng(3);
  for (int t = 0; t < 3; ++t) {
    const auto k = random::random_channel_kraus(2, 2, 2, rng);
    const double p2p = gamma_channel(channels::choi_from_kraus(k)).value_bits;
    const double bi =
        gamma_bidirectional(channels::bidirectional_from_kraus(k, 2, 1, 1, 2)).value_bits;
    EXPECT_NEAR(p2p, bi, 1e-6);
    // the same channel acting locally on Alice's side creates nothing across the cut
    const auto local =
        channels::bidirectional_from_local(channels::choi_from_kraus(k), channels::identity_channel(2));
    EXPECT_NEAR(gamma_bidirectional(local).value_bits, 0.0, 1e-6);
  }
}

TEST(GammaBidirectional, IdentityTimesIdentity) {
  const BidirectionalChannel n = unitary_bi(CMat::Identity(4, 4));
  // T over B S_B is the full transpose of that pair, so V = J, Y = 0 is feasible
  const Dims dims = n.choi_dims();
  EXPECT_GE(qcore::min_eigenvalue(qcore::partial_transpose(n.J, dims, {2, 3}) - n.J), -1e-12);
  const double upper = qcore::operator_norm(qcore::partial_trace(n.J, dims, {0, 3}));
  EXPECT_NEAR(upper, 1.0, 1e-12);
  const auto both = gamma_bidirectional_both(n);
  EXPECT_LE(both.dual.value_bits, 1e-6);
  EXPECT_LE(both.relative_difference, 1e-6);
}

TEST(GammaBidirectional, SwapGivesTwo) {
  const BidirectionalChannel n = unitary_bi(channels::swap_matrix(2));
  const Dims dims = n.choi_dims();
  // primal certificate X = J/4, ρ = π; dual certificate V, Y from T(J) = ±1 split
  const CMat tj = qcore::partial_transpose(n.J, dims, {2, 3});
  const CMat eye = CMat::Identity(16, 16);
  const CMat x = n.J / 4.0;
  const CMat lift = CMat::Identity(16, 16) / 4.0;
  EXPECT_GE(qcore::min_eigenvalue(lift - qcore::partial_transpose(x, dims, {2, 3})), -1e-12);
  EXPECT_GE(qcore::min_eigenvalue(lift + qcore::partial_transpose(x, dims, {2, 3})), -1e-12);
  const double lower = (n.J * x).trace().real();
  const CMat v = (eye + tj) / 2.0, y = (eye - tj) / 2.0;
  EXPECT_GE(qcore::min_eigenvalue(v), -1e-12);
  EXPECT_GE(qcore::min_eigenvalue(y), -1e-12);
  const double upper = qcore::operator_norm(qcore::partial_trace(CMat(v + y), dims, {0, 3}));
  EXPECT_NEAR(lower, 4.0, 1e-12);
  EXPECT_NEAR(upper, 4.0, 1e-12);
  const auto both = gamma_bidirectional_both(n);
  EXPECT_NEAR(both.dual.value_bits, 2.0, 1e-6);
  EXPECT_NEAR(both.primal.value_bits, 2.0, 1e-6);
  EXPECT_LE(both.relative_difference, 1e-6);
}

TEST(GammaBidirectional, CnotStrongDualityAndSymmetry) {
  const BidirectionalChannel n = unitary_bi(channels::cnot_matrix());
  EXPECT_TRUE(has_register_symmetry(n.J, 2, 2));
  const auto both = gamma_bidirectional_both(n);
  std::cout << "CNOT R2to2_max = " << both.dual.value_bits << "\n";
  EXPECT_LE(both.relative_difference, 1e-6);
  GammaOptions plain;
  plain.use_symmetry = false;
  EXPECT_NEAR(gamma_bidirectional(n, GammaForm::dual, plain).linear_value, both.dual.linear_value,
              1e-7);
  EXPECT_FALSE(has_register_symmetry(unitary_bi(channels::swap_matrix(2)).J, 2, 2));
}

TEST(GammaBidirectional, ErasureCellStrongDuality) {
  const auto cc = channels::controlled_bidirectional(channels::erasure_wiretap_cell(2, 0.3));
  EXPECT_TRUE(has_register_symmetry(cc.channel.J, 4, 4));
  const auto both = gamma_bidirectional_both(cc.channel);
  ASSERT_EQ(both.dual.status, conic::Status::optimal);
  ASSERT_EQ(both.primal.status, conic::Status::optimal);
  EXPECT_LE(both.relative_difference, 1e-6);
  std::cout << "erasure cell q=0.3 R2to2_max = " << both.dual.value_bits << "\n";
  // never below the reading capacity 2(1 − q)
  EXPECT_GE(both.dual.value_bits, 2.0 * 0.7 - 1e-6);
}

TEST(Rains, MaximallyEntangledQubits) {
  const CMat phi = qcore::max_entangled_state(2);
  const auto r = rains_relative_entropy(phi, {2, 2}, kCut2);
  EXPECT_EQ(r.kind, BoundKind::fw_upper_estimate);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.gap, 1e-3);
  const CMat eye = CMat::Identity(4, 4);
  const double oracle =
      scan_min(phi, [&](double t) { return CMat(t * phi + (1 - t) * (eye - phi) / 3.0); }, 2);
  EXPECT_NEAR(oracle, 1.0, 1e-6);
  EXPECT_NEAR(r.value_bits, oracle, 1e-3);
  // FW minimizes over PPT′ ⊇ scanned family
  EXPECT_LE(r.value_bits, oracle + 1e-9);
}

TEST(Rains, PptStatesGiveZero) {
  random::Rng rng(4);
  const CMat prod = qcore::kron(random::random_density(2, rng), random::random_density(2, rng));
  EXPECT_LE(rains_relative_entropy(prod, {2, 2}, kCut2).value_bits, 1e-6);
  EXPECT_LE(rains_relative_entropy(werner(0.4), {2, 2}, kCut2).value_bits, 1e-6);
  EXPECT_LE(rains_relative_entropy(isotropic(3, 1.0 / 3.0), {3, 3}, kCut2).value_bits, 1e-6);
  int found = 0;
  for (int t = 0; t < 40 && found < 5; ++t) {
    const CMat rho = random::random_density(4, rng);
    if (pt_min_eig(rho, 2) < 0.0) continue;
    ++found;
    EXPECT_LE(rains_relative_entropy(rho, {2, 2}, kCut2).value_bits, 1e-6);
  }
  EXPECT_GT(found, 0);
}

TEST(Rains, WernerSweepMonotone) {
  double prev = std::numeric_limits<double>::infinity();
  FwConfig plain;
  plain.sdp_start = false;
  for (int k = 10; k >= 0; --k) {
    const double p = k / 10.0;
    const CMat rho = werner(p);
    const auto r = rains_relative_entropy(rho, {2, 2}, kCut2);
    EXPECT_LE(r.value_bits, prev + 1e-6);
    prev = r.value_bits;
    if (p <= 0.5) EXPECT_LE(r.value_bits, 1e-6);
    // twirling makes the Werner family optimal; scan is exact
    const CMat eye = CMat::Identity(4, 4), f = channels::swap_matrix(2);
    const double oracle = scan_min(
        rho, [&](double t) { return CMat(t * (eye - f) / 2.0 + (1 - t) * (eye + f) / 6.0); }, 2);
    EXPECT_LE(r.value_bits, oracle + 1e-6);
    EXPECT_GE(r.value_bits + r.gap + 1e-9, oracle - 1e-6);
    // plain start from π, history non-increasing
    const auto q = rains_relative_entropy(rho, {2, 2}, kCut2, plain);
    for (size_t i = 1; i < q.trace.size(); ++i) EXPECT_LE(q.trace[i], q.trace[i - 1] + 1e-12);
    EXPECT_GE(q.gap + 1e-9, q.value_bits - oracle - 1e-6);
  }
}

TEST(RelativeEntropyOfEntanglement, BasicValues) {
  random::Rng rng(5);
  const CMat prod = qcore::kron(random::random_density(2, rng), random::random_density(2, rng));
  EXPECT_LE(relative_entropy_of_entanglement_ppt(prod, {2, 2}, kCut2).value_bits, 1e-6);
  const CMat phi = qcore::max_entangled_state(2);
  const auto e = relative_entropy_of_entanglement_ppt(phi, {2, 2}, kCut2);
  EXPECT_NEAR(e.value_bits, 1.0, 1e-3);
  EXPECT_NEAR(e.value_bits, rains_relative_entropy(phi, {2, 2}, kCut2).value_bits, 1e-3);
}

TEST(RelativeEntropyOfEntanglement, OrderingChain) {
  random::Rng rng(6);
  for (int t = 0; t < 6; ++t) {
    const CMat rho = random::random_density(4, rng);
    const auto e = relative_entropy_of_entanglement_ppt(rho, {2, 2}, kCut2);
    FwConfig cfg;
    cfg.start_candidates = {e.certificates.at("sigma")};
    const auto r = rains_relative_entropy(rho, {2, 2}, kCut2, cfg);
    const auto w = w_state(rho, {2, 2}, kCut2);
    EXPECT_GE(e.value_bits, r.value_bits - 1e-6);
    EXPECT_LE(r.value_bits, w.value_bits + 1e-6);
    const auto r0 = rains_relative_entropy(rho, {2, 2}, kCut2);
    EXPECT_LE(r0.value_bits, e.value_bits + r0.gap + 1e-6);
    EXPECT_LE(r0.value_bits, w.value_bits + 1e-6);
  }
}

TEST(FrankWolfe, GradientsMatchCentralDifferences) {
  random::Rng rng(10);
  const auto basis = channels::hermitian_operator_basis(4);
  for (int t = 0; t < 4; ++t) {
    const CMat rho = random::random_density(4, rng);
    const CMat sigma = 0.4 * random::random_density(4, rng) + 0.4 * qcore::maximally_mixed(4);
    const double s_rho = qcore::von_neumann_entropy(rho);
    for (double alpha : {0.0, 1.3, 2.0}) {
      auto value = [&](const CMat& s) {
        return alpha == 0.0 ? divergences::relative_entropy(rho, s).value
                            : divergences::sandwiched_renyi(rho, s, alpha).value;
      };
      double f = 0.0;
      CMat g;
      const bool ok = alpha == 0.0
                          ? detail::relative_entropy_value_grad(rho, s_rho, sigma, f, &g)
                          : detail::sandwiched_value_grad(rho, alpha, sigma, f, &g);
      ASSERT_TRUE(ok);
      EXPECT_NEAR(f, value(sigma), 1e-10);
      const double h = 1e-6;
      for (const auto& b : basis) {
        const double fd = (value(CMat(sigma + h * b)) - value(CMat(sigma - h * b))) / (2.0 * h);
        EXPECT_NEAR(detail::re_inner(g, b), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(SandwichedRains, LimitsAndRange) {
  const CMat phi = qcore::max_entangled_state(2);
  const double r = rains_relative_entropy(phi, {2, 2}, kCut2).value_bits;
  EXPECT_NEAR(sandwiched_rains(phi, {2, 2}, kCut2, 1.01).value_bits, r, 5e-3);
  EXPECT_LE(sandwiched_rains(werner(0.3), {2, 2}, kCut2, 1.5).value_bits, 1e-6);
  EXPECT_THROW(sandwiched_rains(phi, {2, 2}, kCut2, 1.0), std::out_of_range);
  EXPECT_THROW(sandwiched_rains(phi, {2, 2}, kCut2, 2.5), std::out_of_range);
}

TEST(SandwichedRains, MonotoneInAlphaUpToGaps) {
  random::Rng rng(7);
  for (int t = 0; t < 3; ++t) {
    const CMat rho = random::random_density(4, rng);
    const auto a = sandwiched_rains(rho, {2, 2}, kCut2, 1.2);
    const auto b = sandwiched_rains(rho, {2, 2}, kCut2, 1.8);
    EXPECT_LE(a.value_bits, b.value_bits + a.gap + b.gap + 1e-6);
    // pointwise ordering on the same σ
    const CMat s = b.certificates.at("sigma");
    EXPECT_LE(divergences::sandwiched_renyi(rho, s, 1.2).value,
              divergences::sandwiched_renyi(rho, s, 1.8).value + 1e-6);
  }
}

TEST(EmaxPpt, Values) {
  random::Rng rng(8);
  const CMat prod = qcore::kron(random::random_density(2, rng), random::random_density(2, rng));
  EXPECT_NEAR(e_max_ppt(prod, {2, 2}, kCut2).value_bits, 0.0, 1e-6);
  const CMat phi = qcore::max_entangled_state(2);
  // isotropic PPT states: D_max(Φ‖σ_t) = log₂(1/t), t ≤ 1/2
  double oracle = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 1000; ++k) {
    const double tt = k / 1000.0;
    if (pt_min_eig(isotropic(2, tt), 2) < -1e-12) continue;
    oracle = std::min(oracle, divergences::max_relative_entropy_eigen(phi, isotropic(2, tt)).value);
  }
  EXPECT_NEAR(oracle, 1.0, 1e-9);
  const auto e = e_max_ppt(phi, {2, 2}, kCut2);
  EXPECT_EQ(e.kind, BoundKind::ppt_relaxation);
  EXPECT_NEAR(e.value_bits, oracle, 1e-6);
  for (int t = 0; t < 10; ++t) {
    const CMat rho = random::random_density(4, rng);
    EXPECT_GE(e_max_ppt(rho, {2, 2}, kCut2).value_bits, w_state(rho, {2, 2}, kCut2).value_bits - 1e-6);
  }
}

TEST(EmaxBidirectional, LocalSwapCnot) {
  EmaxConfig cfg;
  cfg.restarts = 3;
  const auto loc = e_max_bidirectional_lower(unitary_bi(CMat::Identity(4, 4)), cfg);
  EXPECT_EQ(loc.kind, BoundKind::heuristic_lower);
  EXPECT_NEAR(loc.value_bits, 0.0, 1e-6);

  const BidirectionalChannel sw = unitary_bi(channels::swap_matrix(2));
  const CMat phi = qcore::max_entangled_state(2);
  const CMat direct = channels::apply_bidirectional(sw, qcore::kron(phi, phi), 2, 2);
  EXPECT_NEAR(e_max_ppt(direct, {2, 2, 2, 2}, kCut4).value_bits, 2.0, 1e-6);
  cfg.restarts = 20;
  const auto s = e_max_bidirectional_lower(sw, cfg);
  EXPECT_GE(s.value_bits, 2.0 - 1e-3);

  cfg.restarts = 6;
  const auto c = e_max_bidirectional_lower(unitary_bi(channels::cnot_matrix()), cfg);
  ASSERT_EQ(c.trace.size(), 6u);
  double run = -std::numeric_limits<double>::infinity();
  for (double v : c.trace) {
    const double next = std::max(run, v);
    EXPECT_GE(next, run);
    run = next;
  }
  EXPECT_DOUBLE_EQ(run, c.value_bits);
  std::cout << "CNOT E2to2_max lower = " << c.value_bits << "\n";
}

TEST(Amortization, IdentityAndSwapTightness) {
  const BidirectionalChannel id = unitary_bi(CMat::Identity(4, 4));
  random::Rng rng(9);
  for (int t = 0; t < 5; ++t) {
    const auto d = amortization_difference(id, random::random_density(16, rng), 2, 2);
    ASSERT_TRUE(d.has_value());
    EXPECT_LE(*d, 1e-6);
  }
  const BidirectionalChannel sw = unitary_bi(channels::swap_matrix(2));
  const CMat phi = qcore::max_entangled_state(2);
  const auto d = amortization_difference(sw, qcore::kron(phi, phi), 2, 2);
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(*d, 2.0, 1e-6);
  EXPECT_NEAR(*d, gamma_bidirectional(sw).value_bits, 1e-6);
}

TEST(Amortization, RandomStatesThroughCnotAndSwap) {
  for (const CMat& u : {channels::cnot_matrix(), channels::swap_matrix(2)}) {
    const auto rep = amortization_check_rains(unitary_bi(u), 20, 42);
    EXPECT_EQ(rep.violated, 0);
    EXPECT_EQ(rep.skipped, 0);
    EXPECT_EQ(rep.passed, 20);
    EXPECT_TRUE(rep.holds());
  }
}

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
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "biqap/channels.hpp"
#include "biqap/measures.hpp"
#include "biqap/random.hpp"

namespace biqap::reading {

using channels::WiretapMemoryCell;
using measures::BoundReport;

/** Distribution p_X and a pure input on L_B ⊗ B′. */
struct ReadingEnsemble {
  std::vector<double> p;
  CVec input;
  int d_lb = 0;

  void validate(const WiretapMemoryCell& cell, double tol = 1e-9) const {
    if (static_cast<int>(p.size()) != cell.size()) {
      throw std::invalid_argument("ReadingEnsemble: p does not match the cell alphabet");
    }
    double s = 0.0;
    for (double x : p) {
      if (!(x >= -tol)) throw std::invalid_argument("ReadingEnsemble: negative probability");
      s += x;
    }
    if (std::abs(s - 1.0) > tol) throw std::invalid_argument("ReadingEnsemble: p does not sum to 1");
    if (d_lb < 1 || input.size() != static_cast<long>(d_lb) * cell.d_in()) {
      throw std::invalid_argument("ReadingEnsemble: input is not a vector on L_B B′");
    }
    if (std::abs(input.norm() - 1.0) > tol) {
      throw std::invalid_argument("ReadingEnsemble: input is not normalized");
    }
  }
};

/** Uniform p with the maximally entangled input on L_B B′. */
inline ReadingEnsemble uniform_max_entangled(const WiretapMemoryCell& cell) {
  ReadingEnsemble e;
  e.p.assign(cell.size(), 1.0 / cell.size());
  e.d_lb = cell.d_in();
  e.input = qcore::max_entangled_vector(cell.d_in(), true);
  return e;
}

struct RateReport {
  /** I(X;L_B B) − I(X;E), n = 1 term. */
  double rate_bits = 0.0;
  double i_x_lbb = 0.0;
  double i_x_e = 0.0;
  /** I(X⟩L_B B) of the coherent state. */
  double coherent = 0.0;
  ReadingEnsemble ensemble;
  /** Running best value after each restart (optimizer only). */
  std::vector<double> trace;
  std::string label = "n=1 lower bound";
};

inline double erasure_private_capacity(int d, double q) {
  if (d < 2) throw std::out_of_range("erasure_private_capacity: d must be at least 2");
  if (!(q >= 0.0 && q <= 1.0)) throw std::out_of_range("erasure_private_capacity: q outside [0,1]");
  return 2.0 * (1.0 - q) * std::log2(static_cast<double>(d));
}

namespace detail {

/** Branch state (I ⊗ U^x)|σ⟩ on L_B ⊗ B ⊗ E. */
inline CVec branch(const channels::IsometricExtension& u, const CVec& input, int d_lb) {
  return qcore::kron(CMat::Identity(d_lb, d_lb), u.V) * input;
}

inline double entropy(const CMat& rho) { return qcore::von_neumann_entropy(qcore::hermitian_part(rho)); }

}  // namespace detail

/** τ = Σ p(x)|x⟩⟨x| ⊗ (U^x σ U^x†); entropies per branch. */
inline RateReport nonadaptive_rate(const WiretapMemoryCell& cell, const ReadingEnsemble& ens) {
  cell.validate();
  ens.validate(cell);
  const int dl = ens.d_lb, db = cell.d_b(), de = cell.d_e();
  const Dims dims{dl, db, de};
  const long nlb = static_cast<long>(dl) * db;
  CMat avg_lbb = CMat::Zero(nlb, nlb), avg_e = CMat::Zero(de, de);
  double cond_lbb = 0.0, cond_e = 0.0;
  for (int x = 0; x < cell.size(); ++x) {
    if (ens.p[x] <= 0.0) continue;
    const CVec v = detail::branch(cell.elements[x], ens.input, dl);
    const CMat psi = v * v.adjoint();
    const CMat lbb = qcore::partial_trace(psi, dims, {0, 1});
    const CMat e = qcore::partial_trace(psi, dims, {2});
    avg_lbb += ens.p[x] * lbb;
    avg_e += ens.p[x] * e;
    cond_lbb += ens.p[x] * detail::entropy(lbb);
    cond_e += ens.p[x] * detail::entropy(e);
  }
  RateReport r;
  r.ensemble = ens;
  r.i_x_lbb = detail::entropy(avg_lbb) - cond_lbb;
  r.i_x_e = detail::entropy(avg_e) - cond_e;
  r.rate_bits = r.i_x_lbb - r.i_x_e;
  // pure branches: the coherent information reduces to H(L_B B) − H(E)
  r.coherent = detail::entropy(avg_lbb) - detail::entropy(avg_e);
  return r;
}

/** I(X⟩L_B B) of |ω⟩ = Σ √p(x)|x⟩ ⊗ (I ⊗ U^x)|σ⟩, from the global pure state. */
inline RateReport coherent_rate(const WiretapMemoryCell& cell, const ReadingEnsemble& ens) {
  cell.validate();
  ens.validate(cell);
  const int nx = cell.size(), dl = ens.d_lb, db = cell.d_b(), de = cell.d_e();
  const long nb = static_cast<long>(dl) * db * de;
  CVec omega = CVec::Zero(nx * nb);
  for (int x = 0; x < nx; ++x) {
    omega.segment(x * nb, nb) = std::sqrt(std::max(ens.p[x], 0.0)) *
                                detail::branch(cell.elements[x], ens.input, dl);
  }
  const CMat w = omega * omega.adjoint();
  const Dims dims{nx, dl, db, de};
  const double h_lbb = detail::entropy(qcore::partial_trace(w, dims, {1, 2}));
  const double h_xlbb = detail::entropy(qcore::partial_trace(w, dims, {0, 1, 2}));
  RateReport r = nonadaptive_rate(cell, ens);
  r.coherent = h_lbb - h_xlbb;
  return r;
}

// ---- optimizer ----

struct OptimizeConfig {
  int restarts = 16;
  int steps = 200;
  std::uint64_t seed = 1;
  /** 0 reads BIQAP_THREADS, falling back to the hardware concurrency. */
  int threads = 0;
  double fd_step = 1e-6;
  double tol = 1e-12;
  /** Start 0 is uniform p with a maximally entangled input. */
  bool structured_start = true;
};

inline int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BIQAP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

/** p = softmax(a), input = v/‖v‖ with v = re + i·im. */
inline ReadingEnsemble ensemble_from(const std::vector<double>& f, int nx, int dl, int din) {
  ReadingEnsemble e;
  e.d_lb = dl;
  const long n = static_cast<long>(dl) * din;
  const double mx = *std::max_element(f.begin(), f.begin() + nx);
  double s = 0.0;
  e.p.resize(nx);
  for (int x = 0; x < nx; ++x) s += (e.p[x] = std::exp(f[x] - mx));
  for (auto& x : e.p) x /= s;
  e.input = CVec(n);
  for (long k = 0; k < n; ++k) e.input(k) = cplx(f[nx + k], f[nx + n + k]);
  const double nv = e.input.norm();
  if (nv > 0.0) e.input /= nv;
  return e;
}

inline RateReport ascend(const WiretapMemoryCell& cell, std::vector<double> f, int dl,
                         const OptimizeConfig& cfg) {
  const int nx = cell.size(), din = cell.d_in();
  auto value = [&](const std::vector<double>& x) {
    return nonadaptive_rate(cell, ensemble_from(x, nx, dl, din)).rate_bits;
  };
  double fv = value(f);
  double step = 1.0;
  for (int it = 0; it < cfg.steps; ++it) {
    std::vector<double> g(f.size());
    double gn = 0.0;
    for (size_t k = 0; k < f.size(); ++k) {
      std::vector<double> xp = f, xm = f;
      xp[k] += cfg.fd_step;
      xm[k] -= cfg.fd_step;
      g[k] = (value(xp) - value(xm)) / (2.0 * cfg.fd_step);
      gn += g[k] * g[k];
    }
    if (gn <= 1e-24) break;
    bool moved = false;
    step = std::min(4.0 * step, 16.0);
    for (int h = 0; h < 40; ++h, step *= 0.5) {
      std::vector<double> xn = f;
      for (size_t k = 0; k < f.size(); ++k) xn[k] += step * g[k];
      const double vn = value(xn);
      if (vn >= fv + 1e-4 * step * gn) {
        const double gain = vn - fv;
        f = xn;
        fv = vn;
        moved = gain > cfg.tol;
        break;
      }
    }
    if (!moved) break;
  }
  return nonadaptive_rate(cell, ensemble_from(f, nx, dl, din));
}

}  // namespace detail

/**
 * Best-found n = 1 rate over (p, pure input) by multi-start ascent. Restart
 * r uses seed derive_seed(seed, r); the reduction keeps the first maximum.
 */
inline RateReport optimize_rate(const WiretapMemoryCell& cell, const OptimizeConfig& cfg = {}) {
  cell.validate();
  const int nx = cell.size(), din = cell.d_in(), dl = din;
  const long n = static_cast<long>(dl) * din;
  if (cfg.restarts < 1) throw std::invalid_argument("optimize_rate: need at least one restart");
  std::vector<RateReport> results(cfg.restarts);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next++; r < cfg.restarts; r = next++) {
      std::vector<double> f(nx + 2 * n, 0.0);
      if (r == 0 && cfg.structured_start) {
        const CVec phi = qcore::max_entangled_vector(din, true);
        for (long k = 0; k < n; ++k) f[nx + k] = phi(k).real();
      } else {
        random::Rng rng(random::derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        const auto p = random::dirichlet(nx, 1.0, rng);
        for (int x = 0; x < nx; ++x) f[x] = std::log(std::max(p[x], 1e-300));
        const CVec v = random::haar_state(n, rng);
        for (long k = 0; k < n; ++k) {
          f[nx + k] = v(k).real();
          f[nx + n + k] = v(k).imag();
        }
      }
      results[r] = detail::ascend(cell, std::move(f), dl, cfg);
    }
  };
  const int nt = std::min(thread_count(cfg.threads), cfg.restarts);
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // a point mass on one letter encodes nothing and gives rate 0
  ReadingEnsemble point = uniform_max_entangled(cell);
  std::fill(point.p.begin(), point.p.end(), 0.0);
  point.p[0] = 1.0;
  RateReport best = nonadaptive_rate(cell, point);
  best.rate_bits = std::max(best.rate_bits, 0.0);
  std::vector<double> trace;
  for (const auto& r : results) {
    if (r.rate_bits > best.rate_bits) best = r;
    trace.push_back(best.rate_bits);
  }
  best.trace = std::move(trace);
  return best;
}

// ---- upper bound pipeline ----

struct CellBoundConfig {
  measures::GammaOptions gamma;
  /** 0 skips the heuristic E²→² estimate. */
  int emax_restarts = 0;
  int emax_steps = 5;
  std::uint64_t seed = 1;
  channels::ControlledForm form = channels::ControlledForm::coherent;
};

struct CellUpperBound {
  /** Exact SDP value of R²→²_max for the controlled channel. */
  BoundReport r_max;
  /** Heuristic lower estimate of the PPT-relaxed E²→²_max; empty name when skipped. */
  BoundReport e_max_lower;

  bool dominates(double rate_bits, double tol = 1e-3) const {
    return rate_bits <= r_max.value_bits + tol;
  }
};

inline CellUpperBound bidirectional_upper_bound_for_cell(const WiretapMemoryCell& cell,
                                                         const CellBoundConfig& cfg = {}) {
  cell.validate();
  const auto cc = channels::controlled_bidirectional(cell, cfg.form);
  CellUpperBound b;
  b.r_max = measures::gamma_bidirectional(cc.channel, measures::GammaForm::dual, cfg.gamma);
  b.r_max.name = "R2to2_max(cell)";
  if (cfg.emax_restarts > 0) {
    measures::EmaxConfig ec;
    ec.restarts = cfg.emax_restarts;
    ec.steps = cfg.emax_steps;
    ec.seed = cfg.seed;
    b.e_max_lower = measures::e_max_bidirectional_lower(cc.channel, ec);
    b.e_max_lower.name = "E2to2_max(cell) lower";
  }
  return b;
}

}  // namespace biqap::reading

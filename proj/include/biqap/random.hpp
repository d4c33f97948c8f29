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

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "biqap/qcore.hpp"

namespace biqap::random {

using Rng = std::mt19937_64;

inline CVec gaussian_vector(long n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CVec v(n);
  for (long i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v;
}

inline CMat gaussian_matrix(long rows, long cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMat m(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) m(i, j) = cplx(nd(rng), nd(rng));
  }
  return m;
}

/** Haar-random pure state of dimension n. */
inline CVec haar_state(long n, Rng& rng) {
  CVec v = gaussian_vector(n, rng);
  return v / v.norm();
}

/** Haar-random unitary (QR of a Ginibre matrix with phase fix). */
inline CMat haar_unitary(long n, Rng& rng) {
  const CMat g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    const double a = std::abs(d);
    if (a > 0) q.col(i) *= d / a;
  }
  return q;
}

/** Haar-random isometry from dimension n_in into n_out ≥ n_in. */
inline CMat haar_isometry(long n_in, long n_out, Rng& rng) {
  return haar_unitary(n_out, rng).leftCols(n_in);
}

/** Mixed state from the partial trace of a Haar-random pure state on n ⊗ env. */
inline CMat random_density(long n, long env, Rng& rng) {
  const CMat g = gaussian_matrix(n, env, rng);
  CMat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline CMat random_density(long n, Rng& rng) { return random_density(n, n, rng); }

/** Kraus operators of a random channel via a Haar isometry into out ⊗ env. */
inline std::vector<CMat> random_channel_kraus(int d_in, int d_out, int n_kraus,
                                              Rng& rng) {
  if (static_cast<long>(d_out) * n_kraus < d_in) {
    throw std::invalid_argument("random_channel_kraus: d_out * n_kraus < d_in");
  }
  const CMat v = haar_isometry(d_in, static_cast<long>(d_out) * n_kraus, rng);
  std::vector<CMat> kraus(n_kraus, CMat::Zero(d_out, d_in));
  // rows ordered out ⊗ env
  for (int o = 0; o < d_out; ++o) {
    for (int k = 0; k < n_kraus; ++k) {
      kraus[k].row(o) = v.row(static_cast<long>(o) * n_kraus + k);
    }
  }
  return kraus;
}

inline std::vector<double> dirichlet(int k, double alpha, Rng& rng) {
  std::gamma_distribution<double> gd(alpha, 1.0);
  std::vector<double> p(k);
  double s = 0.0;
  for (auto& x : p) {
    x = gd(rng);
    s += x;
  }
  for (auto& x : p) x /= s;
  return p;
}

inline double uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/** Derives an independent stream seed; used for deterministic restarts. */
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace biqap::random

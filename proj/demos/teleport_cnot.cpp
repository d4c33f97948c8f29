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

// Teleportation simulation of CNOT from its Choi state.

#include <cstdio>

#include "biqap/protocols.hpp"

using namespace biqap;

int main() {
  const CMat u = channels::cnot_matrix();
  const auto n = channels::bidirectional_from_unitary(u, 2, 2);
  const auto reps = channels::unitary_output_reps(u, channels::pauli_group(), channels::pauli_group());
  const auto check = channels::verify_bicovariance(n, reps);
  std::printf("bicovariant %d  one-designs %d  residual %.2e\n", check.bicovariant, check.one_designs,
              check.max_residual);
  const auto sim = protocols::teleport_simulate(n, reps);
  const auto d = protocols::diamond_distance(n, sim);
  std::printf("diamond distance to the simulation %.3e (%s)\n", d.value, conic::to_string(d.status));

  // a channel outside the group action is refused
  random::Rng rng(3);
  const auto r = channels::bidirectional_from_unitary(random::haar_unitary(4, rng), 2, 2);
  try {
    protocols::teleport_simulate(r, reps);
  } catch (const std::invalid_argument& e) {
    std::printf("random unitary: %s\n", e.what());
  }
}

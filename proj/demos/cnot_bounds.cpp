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

// Upper and lower bounds for CNOT as a bidirectional channel.

#include <cstdio>

#include "biqap/biqap.hpp"

using namespace biqap;

int main() {
  const auto n = channels::bidirectional_from_unitary(channels::cnot_matrix(), 2, 2);
  const auto both = measures::gamma_bidirectional_both(n);
  std::printf("R2to2_max  primal %.9f  dual %.9f  rel diff %.2e\n", both.primal.value_bits,
              both.dual.value_bits, both.relative_difference);

  measures::EmaxConfig ec;
  ec.restarts = 4;
  const auto e = measures::e_max_bidirectional_lower(n, ec);
  std::printf("E2to2_max  lower estimate %.9f (%s)\n", e.value_bits, measures::to_string(e.kind));

  const auto reps = channels::unitary_output_reps(channels::cnot_matrix(), channels::pauli_group(),
                                                  channels::pauli_group());
  const auto rb = protocols::resource_state_bounds(n, reps);
  std::printf("resource state  R %.6f  E_PPT %.6f\n", rb.rains.value_bits, rb.ree_ppt.value_bits);
}

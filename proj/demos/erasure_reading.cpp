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

// Private reading of the erasure cell: analytic value, n=1 rate and R2to2_max.

#include <cstdio>

#include "biqap/reading.hpp"

using namespace biqap;

int main() {
  std::printf("%5s %10s %10s %10s %10s\n", "q", "analytic", "uniform", "optimized", "R2to2_max");
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto cell = channels::erasure_wiretap_cell(2, q);
    const auto uni = reading::nonadaptive_rate(cell, reading::uniform_max_entangled(cell));
    reading::OptimizeConfig oc;
    oc.restarts = 8;
    const auto opt = reading::optimize_rate(cell, oc);
    const auto ub = reading::bidirectional_upper_bound_for_cell(cell);
    std::printf("%5.2f %10.6f %10.6f %10.6f %10.6f\n", q, reading::erasure_private_capacity(2, q),
                uni.rate_bits, opt.rate_bits, ub.r_max.value_bits);
  }
}

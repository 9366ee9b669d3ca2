// Copyright 2026 The diqkd-bounds Authors
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

#include <cstddef>
#include <functional>
#include <vector>

namespace diqkd::opt {

struct NelderMeadOptions {
  std::size_t max_evals = 2000;
  double initial_step = 0.5;
  /// Stop once the spread of simplex values falls below this.
  double f_tol = 1e-12;
  /// ... and the simplex diameter falls below this.
  double x_tol = 1e-9;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  std::size_t evaluations;
};

/// Downhill simplex with the standard coefficients (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2). Non-finite objective values
/// are treated as +∞.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace diqkd::opt

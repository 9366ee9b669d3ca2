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

#include "diqkd/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace diqkd::opt {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");

  std::size_t evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n && evals < options.max_evals; ++i) values[i] = eval(simplex[i]);
  if (evals < n + 1) {
    // Budget smaller than the simplex; report the best vertex evaluated.
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.begin() + evals) - values.begin());
    return {simplex[best], values[best], evals};
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
  };

  while (evals < options.max_evals) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const auto best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
    if (values[worst] - values[best] <= options.f_tol && diameter <= options.x_tol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);

    along(-1.0, trial, simplex[worst]);
    const double reflected = eval(trial);
    if (reflected < values[best]) {
      along(-2.0, trial2, simplex[worst]);
      const double expanded = evals < options.max_evals ? eval(trial2) : std::numeric_limits<double>::infinity();
      if (expanded < reflected) {
        simplex[worst] = trial2;
        values[worst] = expanded;
      } else {
        simplex[worst] = trial;
        values[worst] = reflected;
      }
      continue;
    }
    if (reflected < values[second]) {
      simplex[worst] = trial;
      values[worst] = reflected;
      continue;
    }
    if (evals >= options.max_evals) break;
    const bool outside = reflected < values[worst];
    along(outside ? -0.5 : 0.5, trial2, simplex[worst]);
    const double contracted = eval(trial2);
    if (contracted < std::min(reflected, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = contracted;
      continue;
    }
    if (outside) {
      simplex[worst] = trial;
      values[worst] = reflected;
    }
    for (std::size_t i = 0; i <= n && evals < options.max_evals; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], evals};
}

}  // namespace diqkd::opt

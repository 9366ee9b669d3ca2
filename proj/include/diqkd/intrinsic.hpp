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

// Upper bounds on the intrinsic information
//
//   I(A;B↓E) = inf over channels Λ: E → E' of I(A;B|E')
//
// by a derivative-free local search over Stinespring-parametrized channels.
// The search can only ever certify an upper bound on the infimum.

#include <cstddef>
#include <cstdint>
#include <span>

#include "diqkd/qip.hpp"

namespace diqkd::intrinsic {

struct SquashSearchConfig {
  std::size_t e_out_dim = 2;
  std::size_t env_dim = 1;
  std::size_t restarts = 16;
  std::size_t max_evals = 2000;
  std::uint64_t seed = 0;
  double tol = 1e-10;

  /// Throws std::invalid_argument on non-positive fields or when
  /// e_out_dim·env_dim < in_dim (no isometry exists).
  void validate(std::size_t in_dim) const;
};

struct SquashResult {
  double best_value;
  qip::Channel best_channel;
  double identity_value;
  /// Best value reached inside the parametrized family alone. For
  /// e_out_dim = 1 this is I(A;B) with Eve traced out.
  double family_value;
  double improvement;
  std::size_t evaluations;
  std::size_t rejected;
};

/// Parameters of a Hermitian generator on C^(e_out·env).
std::size_t generator_parameter_count(std::size_t e_out_dim, std::size_t env_dim);

/// U = exp(iH(theta)); the channel's Kraus operators are the environment
/// slices of U's first in_dim columns. The joint output index is
/// env·e_out_dim + e', so theta = 0 with e_out_dim ≥ in_dim is the identity
/// embedding.
qip::Channel channel_from_params(std::span<const double> theta, std::size_t in_dim, std::size_t e_out_dim,
                                 std::size_t env_dim);

struct TripartiteParts {
  std::size_t a = 0;
  std::size_t b = 1;
  std::size_t e = 2;
};

/// Restart 0 starts from theta = 0; the others start from independent
/// Gaussian points drawn from a stream keyed by (seed, restart). Restarts
/// run on worker threads and are reduced in restart order, so the result
/// depends only on (rho, cfg).
SquashResult intrinsic_upper(const qip::Operator& rho, const SquashSearchConfig& cfg, TripartiteParts parts = {});

}  // namespace diqkd::intrinsic

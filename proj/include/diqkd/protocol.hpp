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

// Monte Carlo simulation of the standard CHSH-based DIQKD protocol: data
// generation rounds, parameter estimation with the abort rule, and
// asymptotic key-length accounting in place of explicit error correction
// and privacy amplification.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "diqkd/qip.hpp"

namespace diqkd::protocol {

/// p(a, b | x, y) with per-input normalization.
class Correlation {
 public:
  Correlation(std::size_t inputs_a, std::size_t inputs_b, std::size_t outputs_a, std::size_t outputs_b);

  std::size_t inputs_a() const { return inputs_a_; }
  std::size_t inputs_b() const { return inputs_b_; }
  std::size_t outputs_a() const { return outputs_a_; }
  std::size_t outputs_b() const { return outputs_b_; }

  double operator()(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const;
  double& at(std::size_t x, std::size_t y, std::size_t a, std::size_t b);

  /// Largest |Σ_ab p(a,b|x,y) − 1| over inputs.
  double normalization_error() const;
  /// Throws std::invalid_argument on negative entries or normalization
  /// error above tol.
  void validate(double tol = 1e-10) const;

 private:
  std::size_t index(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const;

  std::size_t inputs_a_, inputs_b_, outputs_a_, outputs_b_;
  std::vector<double> table_;
};

/// Born rule on a bipartite state.
Correlation correlation_from_tuple(const qip::Operator& rho_ab, std::span<const qip::Povm> alice,
                                   std::span<const qip::Povm> bob);

/// CHSH winning probability over inputs x, y ∈ {0, 1}, winning iff a⊕b = xy.
double omega_of_p(const Correlation& p);
double s_of_p(const Correlation& p);
double q_of_p(const Correlation& p, std::size_t key_x, std::size_t key_y);
/// Largest change of either party's marginal when the other party's input varies.
double no_signalling_check(const Correlation& p);

Correlation pr_box();
/// a = b = 0 for every input; three Bob inputs so (0, 2) is a key pair.
Correlation classical_deterministic();
/// The optimal attack tuple at (S, Q), Bob inputs {0, 1, 2}.
Correlation attack_device(double s, double q);
/// Φ+ through a depolarizing channel of strength ν, measured with the
/// standard optimal CHSH settings and σ_z key measurements.
Correlation depolarizing_device(double nu);

/// CSV with header x,y,a,b,p; alphabet sizes are inferred. Entries not
/// listed are zero.
Correlation read_correlation_csv(std::istream& in);
void write_correlation_csv(std::ostream& out, const Correlation& p);

struct ProtocolConfig {
  std::uint64_t n = 100000;
  double test_prob = 0.5;
  double omega_exp = 0.75;
  std::size_t key_x = 0;
  std::size_t key_y = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimReport {
  std::uint64_t test_rounds = 0;
  std::uint64_t key_rounds = 0;
  std::uint64_t wins = 0;
  std::uint64_t key_errors = 0;
  /// NaN when test_rounds = 0.
  double observed_omega = 0.0;
  bool omega_defined = false;
  /// NaN when key_rounds = 0.
  double observed_qber = 0.0;
  bool qber_defined = false;
  bool abort = false;
  double asymptotic_key_bits = 0.0;
  /// Test-round tallies of (x, y, a, b), index ((2x + y)·2 + a)·2 + b.
  std::vector<std::uint64_t> test_counts;

  double observed_s() const { return 8.0 * observed_omega - 4.0; }
  std::string to_json() const;
  std::string to_text() const;
};

/// Rate per key round as a function of (S, Q).
using RateFn = std::function<double(double s, double q)>;

/// H(A|E) − H(A|B) of the optimal attack, with S clamped to [2, 2√2] and Q
/// to [0, 1/2].
double default_rate(double s, double q);

/// key_rounds · max(0, rate(observed S, observed Q)); 0 for aborted runs or
/// runs without key rounds.
double asymptotic_key_bits(const SimReport& report, const RateFn& rate = default_rate);

/// IID rounds sampled from p. An undefined winning estimate (no test
/// rounds) aborts. Deterministic in (p, cfg).
SimReport run_protocol(const Correlation& p, const ProtocolConfig& cfg);

}  // namespace diqkd::protocol

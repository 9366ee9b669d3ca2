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

// Upper and lower bounds on CHSH-based device-independent key rates,
// evaluated on the two-qubit collective attack that is optimal for a given
// CHSH violation S and bit error rate Q.
//
// The attack state is a mixture of the Bell states Φ+ and Φ−, with weights
// (1±C)/2 where C = √((S/2)² − 1). Eve holds its purification. Alice's key
// measurement is σ_z; Bob's key measurement (input 2) is σ_z blurred into a
// random bit with probability 2Q.
//
// Parties in every tripartite operator here are ordered (A, B, E).

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "diqkd/qip.hpp"

namespace diqkd::chsh {

inline constexpr std::size_t kPartyA = 0;
inline constexpr std::size_t kPartyB = 1;
inline constexpr std::size_t kPartyE = 2;
inline constexpr std::size_t kKeyInputAlice = 0;
inline constexpr std::size_t kKeyInputBob = 2;

double max_violation();  // 2√2

class AttackParams {
 public:
  /// Throws std::invalid_argument unless S ∈ [2, 2√2] and Q ∈ [0, 1/2]
  /// (endpoints accepted within 1e-12 and snapped).
  AttackParams(double s, double q);

  double s() const { return s_; }
  double q() const { return q_; }
  double c() const { return c_; }

 private:
  double s_;
  double q_;
  double c_;
};

/// QBER of the honest depolarized implementation with violation S:
/// Q = (1 − S/(2√2)) / 2.
double depolarizing_qber(double s);
AttackParams depolarizing_params(double s);

struct MeasurementFamilies {
  std::array<qip::Povm, 2> alice;  // A0 = σ_z, A1 = σ_x
  std::array<qip::Povm, 3> bob;    // B0, B1 test observables; B2 noisy key POVM
};

struct AttackTuple {
  qip::Ket state;  // purification on A ⊗ B ⊗ E (2×2×2)
  MeasurementFamilies measurements;
  std::size_t key_x = kKeyInputAlice;
  std::size_t key_y = kKeyInputBob;
};

qip::Operator build_attack_state(const AttackParams& p);
/// √((1+C)/2)|Φ+⟩|0⟩ + √((1−C)/2)|Φ−⟩|1⟩.
qip::Ket attack_purification(const AttackParams& p);
MeasurementFamilies build_measurements(const AttackParams& p);
AttackTuple build_attack_tuple(const AttackParams& p);

/// ⟨A0B0⟩ + ⟨A0B1⟩ + ⟨A1B0⟩ − ⟨A1B1⟩ on a two-qubit state, using the first
/// two binary POVMs of each party.
double chsh_value(const qip::Operator& state_ab, std::span<const qip::Povm> alice,
                  std::span<const qip::Povm> bob);
double qber(const AttackTuple& tuple);

/// Classical-classical-quantum state of the measured purification for inputs (x, y).
qip::Operator measured_ccq_state(const AttackTuple& tuple, std::size_t x, std::size_t y);
/// Closed-form key-round state.
qip::Operator key_ccq_state(const AttackParams& p);

double theorem1_bound(const AttackParams& p);
double corollary1_bound(double s);
/// H(A|E) − H(A|B) on the key-round state; not clamped.
double lower_bound_dw(const AttackParams& p);
/// H(A|E) on the key-round state.
double entropy_rate(const AttackParams& p);

/// I(A;B|E) after measuring the purification with inputs (x, y).
double pair_cmi(const AttackParams& p, std::size_t x, std::size_t y);
/// Max over (x, y) ∈ {0,1}×{0,1,2} of pair_cmi.
double appendixB_bound(const AttackParams& p);
/// appendixB_bound under the depolarizing coupling of Q to S.
double appendixB_bound(double s);
/// Violation where the (1,1) branch and the key-input branch intersect
/// under the depolarizing coupling; bisection to `tol` in S.
double appendixB_crossover(double tol = 1e-6);
/// Root in S of lower_bound_dw under the depolarizing coupling.
double noise_threshold_violation(double tol = 1e-10);

struct KeyRatePoint {
  double s;
  double q;
  double lower;
  double entropy_rate;
  double upper_thm1;
  double upper_appB;
};

KeyRatePoint evaluate_point(const AttackParams& p);

/// Surface over independent (S, Q), row-major with S as the outer index.
std::vector<KeyRatePoint> sweep_surface(std::size_t s_points, std::size_t q_points);
/// Curve over S with Q tied by the depolarizing coupling.
std::vector<KeyRatePoint> sweep_curve(std::size_t s_points);

/// `points` equally spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t points);

}  // namespace diqkd::chsh

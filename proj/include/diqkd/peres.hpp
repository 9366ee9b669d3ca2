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

// One-way key rates of the Vertesi-Brunner bound-entangled two-qutrit state
// under its Bell-violating measurements.
//
// For each Alice input x the rate is H(A|E) − H(A|B) on the cqq state with
// Alice measured; for each Bob input y it is H(B|E) − H(B|A) on the qcq
// state with Bob measured. Eve holds the spectral purification of ρ.

#include <array>
#include <cstdint>
#include <string>

#include "diqkd/qip.hpp"

namespace diqkd::peres {

/// Exact rational with positive denominator, always reduced.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend Rational operator+(const Rational& l, const Rational& r);
  friend bool operator==(const Rational&, const Rational&) = default;
};

inline constexpr double kDefaultAliceQ = 0.2;

struct VBState {
  qip::Operator rho;
  std::array<Rational, 4> lambdas;
  std::array<qip::Ket, 4> psis;
  double a;

  /// Σ_i √λ_i |ψ_i⟩|i⟩_E on 3 × 3 × 4.
  qip::Ket purification() const;
};

struct VBMeasurements {
  std::array<qip::Povm, 3> alice;  // binary, outcome 0 is |A_x⟩⟨A_x|
  std::array<qip::Povm, 2> bob;    // y = 0: three outcomes, y = 1: two outcomes
};

VBState build_vb_state();
/// Alice's vectors depend on q; q = 1/5 reproduces the Bell violation.
VBMeasurements build_vb_measurements(double q = kDefaultAliceQ);

/// Minimum eigenvalue of the partial transpose on `party`.
double ppt_check(const qip::Operator& rho, std::size_t party = 1);

/// A one-way rate computed along two independent entropy routes.
struct RateValue {
  /// Joint entropies of the full tripartite operator:
  /// H(XE) − H(E) − H(XY) + H(Y).
  double joint;
  /// Classical-quantum decomposition: H(X|Q) = H(p) + Σ p_k S(ρ_Q^k) − S(ρ_Q).
  double direct;
};

/// Measures `party` (0 or 1) of a pure state on A ⊗ B ⊗ E and returns
/// H(X|E) − H(X|other) with the other party left quantum.
RateValue one_way_rate(const qip::Ket& purified, const qip::Povm& measurement, std::size_t party);

RateValue alice_rate(const VBState& state, const VBMeasurements& m, std::size_t x);
RateValue bob_rate(const VBState& state, const VBMeasurements& m, std::size_t y);

struct EvidenceReport {
  double q;
  double ppt_min_eig;
  std::array<double, 3> alice_rates;
  std::array<double, 2> bob_rates;
  /// Largest |joint − direct| over all five rates.
  double path_disagreement;
  double max_alice;
  double max_bob;

  /// Rates ≤ tol, PPT margin ≥ −tol.
  bool supports_no_key(double tol) const;
  std::string to_text() const;
  std::string to_csv() const;
};

EvidenceReport evidence_report(double q = kDefaultAliceQ);

}  // namespace diqkd::peres

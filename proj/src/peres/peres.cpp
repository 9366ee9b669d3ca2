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

#include "diqkd/peres.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "diqkd/format.hpp"

namespace diqkd::peres {

using qip::Ket;
using qip::Matrix;
using qip::Operator;
using qip::Povm;
using qip::Vector;

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const auto g = std::gcd(n, d);
  num = n / g;
  den = d / g;
}

Rational operator+(const Rational& l, const Rational& r) {
  const auto g = std::gcd(l.den, r.den);
  return Rational(l.num * (r.den / g) + r.num * (l.den / g), l.den / g * r.den);
}

namespace {

// |ij⟩ on C^3 ⊗ C^3.
constexpr int idx(int i, int j) { return 3 * i + j; }

Vector basis3(double c0, double c1, double c2) {
  Vector v(3);
  v << c0, c1, c2;
  return v;
}

// Rows = measured party, columns = (other party, E) in that order.
Matrix coefficient_matrix(const Ket& psi, std::size_t party) {
  const auto& d = psi.dims();
  const auto dx = static_cast<Eigen::Index>(d[party]);
  const auto dy = static_cast<Eigen::Index>(d[1 - party]);
  const auto de = static_cast<Eigen::Index>(d[2]);
  Matrix out(dx, dy * de);
  for (Eigen::Index x = 0; x < dx; ++x)
    for (Eigen::Index y = 0; y < dy; ++y)
      for (Eigen::Index e = 0; e < de; ++e) {
        const auto a = party == 0 ? x : y;
        const auto b = party == 0 ? y : x;
        out(x, y * de + e) = psi.amplitudes()((a * d[1] + b) * de + e);
      }
  return out;
}

// H(X|Q) for a classical X with conditional (unnormalized) states `blocks`.
double cq_conditional_entropy(const std::vector<Operator>& blocks) {
  double h = 0.0;
  Matrix total = Matrix::Zero(blocks.front().dim(), blocks.front().dim());
  for (const auto& block : blocks) {
    total += block.matrix();
    const double p = block.trace().real();
    if (p <= qip::kClipWindow) continue;
    h += -p * std::log2(p) + p * qip::von_neumann_entropy(block * (1.0 / p));
  }
  return h - qip::von_neumann_entropy(Operator(total, blocks.front().dims()));
}

}  // namespace

Ket VBState::purification() const {
  Vector psi = Vector::Zero(36);
  for (int i = 0; i < 4; ++i) {
    const double w = std::sqrt(lambdas[i].value());
    for (int k = 0; k < 9; ++k) psi(4 * k + i) = w * psis[i].amplitudes()(k);
  }
  return Ket(std::move(psi), {3, 3, 4});
}

VBState build_vb_state() {
  const double a = std::sqrt(131.0 / 2.0);
  const std::array<Rational, 4> lambdas{Rational(3257, 6884), Rational(450, 1721), Rational(450, 1721),
                                        Rational(27, 6884)};
  std::array<Vector, 4> v;
  for (auto& x : v) x = Vector::Zero(9);
  v[0](idx(0, 0)) = v[0](idx(1, 1)) = 1.0 / std::sqrt(2.0);
  v[1](idx(0, 1)) = v[1](idx(1, 0)) = a / 12.0;
  v[1](idx(0, 2)) = 1.0 / 60.0;
  v[1](idx(2, 1)) = -3.0 / 10.0;
  v[2](idx(0, 0)) = a / 12.0;
  v[2](idx(1, 1)) = -a / 12.0;
  v[2](idx(1, 2)) = 1.0 / 60.0;
  v[2](idx(2, 0)) = 3.0 / 10.0;
  v[3](idx(0, 1)) = -1.0 / std::sqrt(3.0);
  v[3](idx(1, 0)) = v[3](idx(2, 2)) = 1.0 / std::sqrt(3.0);

  Matrix rho = Matrix::Zero(9, 9);
  for (int i = 0; i < 4; ++i) rho += lambdas[i].value() * v[i] * v[i].adjoint();
  return VBState{Operator(std::move(rho), {3, 3}),
                 lambdas,
                 {Ket(v[0], {3, 3}), Ket(v[1], {3, 3}), Ket(v[2], {3, 3}), Ket(v[3], {3, 3})},
                 a};
}

VBMeasurements build_vb_measurements(double q) {
  if (!(q >= 0.0 && q <= 0.5)) throw std::invalid_argument("build_vb_measurements: q must lie in [0, 1/2]");
  const double tail = std::sqrt(1.0 - 4.0 * q * q);
  const double r3 = std::sqrt(3.0);
  const Matrix id = Matrix::Identity(3, 3);
  auto binary = [&](const Vector& v) {
    const Matrix p = v * v.adjoint();
    return Povm({p, id - p});
  };
  const Vector b0 = basis3(0.0, std::sqrt(2.0 / 3.0), 1.0 / r3);
  const Vector b1 = basis3(-1.0 / std::sqrt(2.0), -1.0 / std::sqrt(6.0), 1.0 / r3);
  const Matrix m00 = b0 * b0.adjoint(), m10 = b1 * b1.adjoint();
  Matrix m01 = Matrix::Zero(3, 3);
  m01(2, 2) = 1.0;
  return VBMeasurements{
      {binary(basis3(-q, r3 * q, tail)), binary(basis3(2.0 * q, 0.0, tail)), binary(basis3(-q, -r3 * q, tail))},
      {Povm({m00, m10, id - m00 - m10}), Povm({m01, id - m01})}};
}

double ppt_check(const Operator& rho, std::size_t party) {
  return qip::eigenvalues_hermitian(qip::partial_transpose(rho, party)).minCoeff();
}

RateValue one_way_rate(const Ket& purified, const Povm& measurement, std::size_t party) {
  if (purified.dims().size() != 3) throw std::invalid_argument("one_way_rate: expected a tripartite pure state");
  if (party > 1) throw std::invalid_argument("one_way_rate: party must be 0 or 1");
  const std::size_t other = 1 - party;
  constexpr std::size_t eve = 2;

  const std::array<qip::Measurement, 1> assignment{qip::Measurement{party, measurement}};
  const auto cq = qip::measure_subsystems(purified, assignment);
  const double joint = qip::conditional_entropy(cq, {party}, {eve}) - qip::conditional_entropy(cq, {party}, {other});

  // Conditional states from the amplitudes: Tr_X[(Λ_k ⊗ I)|ψ⟩⟨ψ|] = Ψᵀ Λ_kᵀ Ψ̄.
  const Matrix psi = coefficient_matrix(purified, party);
  const qip::Dims rest{purified.dims()[other], purified.dims()[eve]};
  std::vector<Operator> eve_blocks, other_blocks;
  for (const auto& element : measurement.elements()) {
    const Operator block(psi.transpose() * element.transpose() * psi.conjugate(), rest);
    eve_blocks.push_back(qip::partial_trace(block, {1}));
    other_blocks.push_back(qip::partial_trace(block, {0}));
  }
  const double direct = cq_conditional_entropy(eve_blocks) - cq_conditional_entropy(other_blocks);
  return RateValue{joint, direct};
}

RateValue alice_rate(const VBState& state, const VBMeasurements& m, std::size_t x) {
  if (x >= m.alice.size()) throw std::invalid_argument("alice_rate: x must be 0, 1 or 2");
  return one_way_rate(state.purification(), m.alice[x], 0);
}

RateValue bob_rate(const VBState& state, const VBMeasurements& m, std::size_t y) {
  if (y >= m.bob.size()) throw std::invalid_argument("bob_rate: y must be 0 or 1");
  return one_way_rate(state.purification(), m.bob[y], 1);
}

bool EvidenceReport::supports_no_key(double tol) const {
  return max_alice <= tol && max_bob <= tol && ppt_min_eig >= -tol;
}

std::string EvidenceReport::to_text() const {
  std::ostringstream out;
  out << "Bound-entangled two-qutrit state, one-way key rates\n";
  out << "q = " << format_number(q) << "\n";
  out << "PPT minimum eigenvalue: " << format_number(ppt_min_eig) << "\n";
  for (std::size_t x = 0; x < alice_rates.size(); ++x)
    out << "H(A|E) - H(A|B), x = " << x << ": " << format_number(alice_rates[x]) << "\n";
  for (std::size_t y = 0; y < bob_rates.size(); ++y)
    out << "H(B|E) - H(B|A), y = " << y << ": " << format_number(bob_rates[y]) << "\n";
  out << "max over x: " << format_number(max_alice) << "\n";
  out << "max over y: " << format_number(max_bob) << "\n";
  out << "entropy route disagreement: " << format_number(path_disagreement) << "\n";
  return out.str();
}

std::string EvidenceReport::to_csv() const {
  std::ostringstream out;
  out << "quantity,index,value\n";
  out << "q,,"<< format_number(q) << "\n";
  out << "ppt_min_eig,," << format_number(ppt_min_eig) << "\n";
  for (std::size_t x = 0; x < alice_rates.size(); ++x) out << "alice_rate," << x << "," << format_number(alice_rates[x]) << "\n";
  for (std::size_t y = 0; y < bob_rates.size(); ++y) out << "bob_rate," << y << "," << format_number(bob_rates[y]) << "\n";
  out << "max_alice,," << format_number(max_alice) << "\n";
  out << "max_bob,," << format_number(max_bob) << "\n";
  out << "path_disagreement,," << format_number(path_disagreement) << "\n";
  return out.str();
}

EvidenceReport evidence_report(double q) {
  const auto state = build_vb_state();
  const auto m = build_vb_measurements(q);
  EvidenceReport report{};
  report.q = q;
  report.ppt_min_eig = ppt_check(state.rho);
  for (std::size_t x = 0; x < 3; ++x) {
    const auto r = alice_rate(state, m, x);
    report.alice_rates[x] = r.joint;
    report.path_disagreement = std::max(report.path_disagreement, std::abs(r.joint - r.direct));
  }
  for (std::size_t y = 0; y < 2; ++y) {
    const auto r = bob_rate(state, m, y);
    report.bob_rates[y] = r.joint;
    report.path_disagreement = std::max(report.path_disagreement, std::abs(r.joint - r.direct));
  }
  report.max_alice = *std::max_element(report.alice_rates.begin(), report.alice_rates.end());
  report.max_bob = *std::max_element(report.bob_rates.begin(), report.bob_rates.end());
  return report;
}

}  // namespace diqkd::peres

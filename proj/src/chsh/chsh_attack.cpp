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

#include "diqkd/chsh_attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diqkd::chsh {

using qip::binary_entropy;
using qip::Matrix;
using qip::Measurement;
using qip::Operator;
using qip::Povm;

namespace {

constexpr double kEndpointSnap = 1e-12;

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

qip::Vector bell(double sign) {
  qip::Vector v = qip::Vector::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = sign / std::sqrt(2.0);
  return v;
}

double snap(double value, double lo, double hi, const char* name) {
  if (!(value >= lo - kEndpointSnap && value <= hi + kEndpointSnap))
    throw std::invalid_argument(std::string("AttackParams: ") + name + " out of range");
  return std::clamp(value, lo, hi);
}

template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double max_violation() { return 2.0 * std::sqrt(2.0); }

AttackParams::AttackParams(double s, double q)
    : s_(snap(s, 2.0, max_violation(), "S")), q_(snap(q, 0.0, 0.5, "Q")) {
  c_ = std::clamp(std::sqrt(std::max(0.0, 0.25 * s_ * s_ - 1.0)), 0.0, 1.0);
}

double depolarizing_qber(double s) { return 0.5 * (1.0 - s / max_violation()); }

AttackParams depolarizing_params(double s) { return AttackParams(s, depolarizing_qber(s)); }

Operator build_attack_state(const AttackParams& p) {
  const auto plus = bell(+1.0);
  const auto minus = bell(-1.0);
  Matrix rho = 0.5 * (1.0 + p.c()) * plus * plus.adjoint() + 0.5 * (1.0 - p.c()) * minus * minus.adjoint();
  return Operator(std::move(rho), {2, 2});
}

qip::Ket attack_purification(const AttackParams& p) {
  qip::Vector e0 = qip::Vector::Zero(2), e1 = qip::Vector::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  qip::Vector psi = std::sqrt(0.5 * (1.0 + p.c())) * qip::kron(bell(+1.0), e0) +
                    std::sqrt(0.5 * (1.0 - p.c())) * qip::kron(bell(-1.0), e1);
  return qip::Ket(std::move(psi), {2, 2, 2});
}

MeasurementFamilies build_measurements(const AttackParams& p) {
  const double norm = std::sqrt(1.0 + p.c() * p.c());
  const Matrix z = pauli_z(), x = pauli_x();
  Matrix key0 = Matrix::Zero(2, 2), key1 = Matrix::Zero(2, 2);
  key0(0, 0) = 1.0;
  key1(1, 1) = 1.0;
  const Matrix id = Matrix::Identity(2, 2);
  const double keep = 1.0 - 2.0 * p.q();
  return MeasurementFamilies{
      {Povm::from_observable(z), Povm::from_observable(x)},
      {Povm::from_observable((z + p.c() * x) / norm), Povm::from_observable((z - p.c() * x) / norm),
       Povm({keep * key0 + p.q() * id, keep * key1 + p.q() * id})}};
}

AttackTuple build_attack_tuple(const AttackParams& p) {
  return AttackTuple{attack_purification(p), build_measurements(p)};
}

double chsh_value(const Operator& state_ab, std::span<const Povm> alice, std::span<const Povm> bob) {
  if (state_ab.dims() != qip::Dims{2, 2}) throw std::invalid_argument("chsh_value: parties must be qubits");
  if (alice.size() < 2 || bob.size() < 2) throw std::invalid_argument("chsh_value: need two inputs per party");
  auto correlator = [&](std::size_t x, std::size_t y) {
    const Matrix obs = qip::kron(alice[x].observable(), bob[y].observable());
    return (obs * state_ab.matrix()).trace().real();
  };
  return correlator(0, 0) + correlator(0, 1) + correlator(1, 0) - correlator(1, 1);
}

Operator measured_ccq_state(const AttackTuple& tuple, std::size_t x, std::size_t y) {
  const auto& m = tuple.measurements;
  if (x >= m.alice.size() || y >= m.bob.size()) throw std::invalid_argument("measured_ccq_state: input out of range");
  const std::array<Measurement, 2> assignments{Measurement{kPartyA, m.alice[x]}, Measurement{kPartyB, m.bob[y]}};
  return qip::measure_subsystems(tuple.state, assignments);
}

double qber(const AttackTuple& tuple) {
  const auto ab = qip::partial_trace(measured_ccq_state(tuple, tuple.key_x, tuple.key_y), {kPartyA, kPartyB});
  // Basis order 00, 01, 10, 11.
  return ab.matrix()(1, 1).real() + ab.matrix()(2, 2).real();
}

Operator key_ccq_state(const AttackParams& p) {
  const double off = std::sqrt(std::max(0.0, 1.0 - p.c() * p.c()));
  Matrix out = Matrix::Zero(8, 8);
  for (int a = 0; a < 2; ++a) {
    const double sign = a == 0 ? 1.0 : -1.0;
    Matrix eve(2, 2);
    eve << 0.5 * (1.0 + p.c()), 0.5 * sign * off, 0.5 * sign * off, 0.5 * (1.0 - p.c());
    for (int b = 0; b < 2; ++b) {
      const double weight = a == b ? 0.5 * (1.0 - p.q()) : 0.5 * p.q();
      out.block((a * 2 + b) * 2, (a * 2 + b) * 2, 2, 2) = weight * eve;
    }
  }
  return Operator(std::move(out), {2, 2, 2});
}

double theorem1_bound(const AttackParams& p) {
  const double s = p.s(), q = p.q();
  const double radicand = 1.0 + q * (1.0 - q) * (s * s - 8.0);
  if (radicand < -qip::kTolerance) throw std::logic_error("theorem1_bound: negative radicand");
  const double a = 0.5 * (1.0 + std::sqrt(std::max(0.0, radicand)));
  return 1.0 + binary_entropy(a) - binary_entropy(q) - binary_entropy(0.5 * (1.0 + p.c()));
}

double corollary1_bound(double s) {
  const auto p = depolarizing_params(s);
  s = p.s();
  const double radicand = std::max(0.0, -32.0 + 16.0 * s * s - s * s * s * s);
  const double a = 0.5 + std::sqrt(radicand) / (8.0 * std::sqrt(2.0));
  return 1.0 + binary_entropy(a) - binary_entropy(p.q()) - binary_entropy(0.5 * (1.0 + p.c()));
}

double entropy_rate(const AttackParams& p) {
  return qip::conditional_entropy(key_ccq_state(p), {kPartyA}, {kPartyE});
}

double lower_bound_dw(const AttackParams& p) {
  const auto rho = key_ccq_state(p);
  return qip::conditional_entropy(rho, {kPartyA}, {kPartyE}) - qip::conditional_entropy(rho, {kPartyA}, {kPartyB});
}

double pair_cmi(const AttackParams& p, std::size_t x, std::size_t y) {
  const auto rho = measured_ccq_state(build_attack_tuple(p), x, y);
  return qip::conditional_mutual_information(rho, {kPartyA}, {kPartyB}, {kPartyE});
}

double appendixB_bound(const AttackParams& p) {
  const auto tuple = build_attack_tuple(p);
  double best = 0.0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 3; ++y) {
      const auto rho = measured_ccq_state(tuple, x, y);
      best = std::max(best, qip::conditional_mutual_information(rho, {kPartyA}, {kPartyB}, {kPartyE}));
    }
  return best;
}

double appendixB_bound(double s) { return appendixB_bound(depolarizing_params(s)); }

double appendixB_crossover(double tol) {
  auto gap = [](double s) {
    const auto p = depolarizing_params(s);
    return pair_cmi(p, kKeyInputAlice, kKeyInputBob) - pair_cmi(p, 1, 1);
  };
  // Locate the last sign change on a coarse scan, then bisect inside it.
  const auto grid = linspace(2.0, max_violation(), 65);
  for (std::size_t i = grid.size() - 1; i-- > 1;) {
    if (gap(grid[i]) < 0.0 && gap(grid[i + 1]) >= 0.0) return bisect(gap, grid[i], grid[i + 1], tol);
  }
  throw std::runtime_error("appendixB_crossover: branches do not intersect");
}

double noise_threshold_violation(double tol) {
  return bisect([](double s) { return lower_bound_dw(depolarizing_params(s)); }, 2.0, max_violation(), tol);
}

KeyRatePoint evaluate_point(const AttackParams& p) {
  return KeyRatePoint{p.s(), p.q(), lower_bound_dw(p), entropy_rate(p), theorem1_bound(p), appendixB_bound(p)};
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  if (points < 2) throw std::invalid_argument("linspace: need at least two points");
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = i + 1 == points ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return out;
}

std::vector<KeyRatePoint> sweep_surface(std::size_t s_points, std::size_t q_points) {
  if (s_points < 2 || q_points < 2) throw std::invalid_argument("sweep_surface: grid needs at least 2 points per axis");
  std::vector<KeyRatePoint> out;
  out.reserve(s_points * q_points);
  for (double s : linspace(2.0, max_violation(), s_points))
    for (double q : linspace(0.0, 0.5, q_points)) out.push_back(evaluate_point(AttackParams(s, q)));
  return out;
}

std::vector<KeyRatePoint> sweep_curve(std::size_t s_points) {
  if (s_points < 2) throw std::invalid_argument("sweep_curve: grid needs at least 2 points");
  std::vector<KeyRatePoint> out;
  out.reserve(s_points);
  for (double s : linspace(2.0, max_violation(), s_points)) out.push_back(evaluate_point(depolarizing_params(s)));
  return out;
}

}  // namespace diqkd::chsh

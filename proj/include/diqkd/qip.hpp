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

// Dense quantum-information primitives on small composite systems.
//
// Every operator carries the ordered list of its tensor-factor dimensions.
// Subsystems are addressed by position in that list and no operation
// reorders them implicitly.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace diqkd::qip {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;
using Parts = std::vector<std::size_t>;

/// Hermiticity, positivity and normalization tolerance (unit trace scale).
inline constexpr double kTolerance = 1e-9;
/// Eigenvalues with magnitude below this are treated as exact zeros.
inline constexpr double kClipWindow = 1e-12;

std::size_t dims_product(const Dims& dims);

class Ket;

class Operator {
 public:
  Operator(Matrix entries, Dims dims);
  /// Single-factor operator; dims = {rows}.
  explicit Operator(Matrix entries);

  static Operator identity(const Dims& dims);
  static Operator maximally_mixed(const Dims& dims);

  const Matrix& matrix() const { return entries_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t num_subsystems() const { return dims_.size(); }

  Complex trace() const { return entries_.trace(); }
  bool is_hermitian(double tol = kTolerance) const;
  bool is_psd(double tol = kTolerance) const;
  /// Hermitian, PSD and unit trace.
  bool is_density(double tol = kTolerance) const;

  Operator operator+(const Operator& other) const;
  Operator operator*(double scale) const;

 private:
  Matrix entries_;
  Dims dims_;
};

inline Operator operator*(double scale, const Operator& op) { return op * scale; }

class Ket {
 public:
  /// Throws std::invalid_argument unless the squared norm is 1 within kTolerance.
  Ket(Vector amplitudes, Dims dims);

  const Vector& amplitudes() const { return amplitudes_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

  Operator projector() const;

 private:
  Vector amplitudes_;
  Dims dims_;
};

/// Positive operator-valued measure on a single subsystem. Outcome k is
/// element k.
class Povm {
 public:
  explicit Povm(std::vector<Matrix> elements);

  /// Projective measurement of a ±1-valued observable; outcome 0 is the +1
  /// eigenspace.
  static Povm from_observable(const Matrix& observable);
  static Povm computational(std::size_t dim);
  /// Single element equal to the identity.
  static Povm trivial(std::size_t dim);

  const std::vector<Matrix>& elements() const { return elements_; }
  std::size_t outcomes() const { return elements_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(elements_.front().rows()); }

  /// Λ_0 − Λ_1 for a binary-outcome measurement.
  Matrix observable() const;

 private:
  std::vector<Matrix> elements_;
};

/// Completely positive trace-preserving map in Kraus form.
class Channel {
 public:
  explicit Channel(std::vector<Matrix> kraus);

  static Channel identity(std::size_t dim);
  /// Traces the input out to a one-dimensional output.
  static Channel trace_out(std::size_t dim);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  std::size_t in_dim() const { return static_cast<std::size_t>(kraus_.front().cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(kraus_.front().rows()); }

  /// max-abs deviation of Σ K†K from the identity.
  double completeness_error() const;

 private:
  std::vector<Matrix> kraus_;
};

struct Measurement {
  std::size_t party;
  Povm povm;
};

Matrix kron(const Matrix& a, const Matrix& b);

Operator tensor(const Operator& a, const Operator& b);
Ket tensor(const Ket& a, const Ket& b);

/// Keeps the listed subsystems in their original relative order.
Operator partial_trace(const Operator& rho, const Parts& keep);
Operator partial_transpose(const Operator& rho, std::size_t party);

/// Real eigenvalues in descending order.
Eigen::VectorXd eigenvalues_hermitian(const Operator& op);

/// Shannon entropy in bits of a (sub)normalized spectrum, with 0·log 0 = 0.
double spectrum_entropy(const Eigen::VectorXd& spectrum);
double von_neumann_entropy(const Operator& rho);
/// H(AB) − H(B) with `parts` playing A and `given` playing B.
double conditional_entropy(const Operator& rho, const Parts& parts, const Parts& given);
double conditional_mutual_information(const Operator& rho, const Parts& a, const Parts& b,
                                      const Parts& e);
double mutual_information(const Operator& rho, const Parts& a, const Parts& b);

/// Spectral purification. The environment is appended as a last subsystem of
/// dimension rank(rho), with basis vectors ordered by descending eigenvalue.
Ket purify(const Operator& rho);

/// Measured parties become classical registers whose dimension equals the
/// number of outcomes; the remaining parties stay quantum.
Operator measure_subsystems(const Operator& rho, std::span<const Measurement> assignments);
Operator measure_subsystems(const Ket& state, std::span<const Measurement> assignments);

Operator apply_channel(const Operator& rho, const Channel& channel, std::size_t party);

double binary_entropy(double x);

}  // namespace diqkd::qip

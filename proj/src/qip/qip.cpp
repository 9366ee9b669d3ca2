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

#include "diqkd/qip.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace diqkd::qip {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Row-major strides: subsystem 0 is the most significant digit.
std::vector<std::size_t> strides(const Dims& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
  return s;
}

// Flat offsets, in the full space, of every joint basis state of `parts`
// (enumerated row-major in the order given), with all other digits zero.
std::vector<std::size_t> offsets(const Dims& dims, const Parts& parts) {
  const auto s = strides(dims);
  std::vector<std::size_t> out{0};
  for (auto p : parts) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * dims[p]);
    for (auto base : out)
      for (std::size_t d = 0; d < dims[p]; ++d) next.push_back(base + d * s[p]);
    out = std::move(next);
  }
  return out;
}

Parts complement(std::size_t n, const Parts& parts) {
  Parts out;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(parts.begin(), parts.end(), i) == parts.end()) out.push_back(i);
  return out;
}

Parts sorted_unique(Parts parts, std::size_t n, const char* what) {
  std::sort(parts.begin(), parts.end());
  require(std::adjacent_find(parts.begin(), parts.end()) == parts.end(),
          std::string(what) + ": repeated subsystem index");
  require(parts.empty() || parts.back() < n, std::string(what) + ": subsystem index out of range");
  return parts;
}

Parts join(std::initializer_list<const Parts*> sets) {
  Parts out;
  for (const auto* s : sets) out.insert(out.end(), s->begin(), s->end());
  std::sort(out.begin(), out.end());
  return out;
}

Matrix embed(const Matrix& local, const Dims& dims, std::size_t party) {
  std::size_t before = 1, after = 1;
  for (std::size_t i = 0; i < party; ++i) before *= dims[i];
  for (std::size_t i = party + 1; i < dims.size(); ++i) after *= dims[i];
  Matrix out = kron(Matrix::Identity(before, before), local);
  return kron(out, Matrix::Identity(after, after));
}

double entropy_of(const Operator& rho, const Parts& keep) {
  return von_neumann_entropy(partial_trace(rho, keep));
}

}  // namespace

std::size_t dims_product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(Matrix entries, Dims dims) : entries_(std::move(entries)), dims_(std::move(dims)) {
  require(entries_.rows() == entries_.cols(), "Operator: matrix must be square");
  require(std::all_of(dims_.begin(), dims_.end(), [](auto d) { return d > 0; }),
          "Operator: subsystem dimensions must be positive");
  require(dims_product(dims_) == static_cast<std::size_t>(entries_.rows()),
          "Operator: product of dims does not match matrix size");
}

Operator::Operator(Matrix entries) : Operator(entries, Dims{static_cast<std::size_t>(entries.rows())}) {}

Operator Operator::identity(const Dims& dims) {
  const auto d = static_cast<Eigen::Index>(dims_product(dims));
  return Operator(Matrix::Identity(d, d), dims);
}

Operator Operator::maximally_mixed(const Dims& dims) {
  return identity(dims) * (1.0 / static_cast<double>(dims_product(dims)));
}

bool Operator::is_hermitian(double tol) const { return max_abs(entries_ - entries_.adjoint()) <= tol; }

bool Operator::is_psd(double tol) const {
  if (!is_hermitian(tol)) return false;
  return eigenvalues_hermitian(*this).minCoeff() >= -tol;
}

bool Operator::is_density(double tol) const {
  return is_psd(tol) && std::abs(trace() - Complex(1.0)) <= tol;
}

Operator Operator::operator+(const Operator& other) const {
  require(dims_ == other.dims_, "Operator: dims mismatch in sum");
  return Operator(entries_ + other.entries_, dims_);
}

Operator Operator::operator*(double scale) const { return Operator(entries_ * scale, dims_); }

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(Vector amplitudes, Dims dims) : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
  require(dims_product(dims_) == static_cast<std::size_t>(amplitudes_.size()),
          "Ket: product of dims does not match vector length");
  require(std::abs(amplitudes_.squaredNorm() - 1.0) <= kTolerance, "Ket: state is not normalized");
}

Operator Ket::projector() const { return Operator(amplitudes_ * amplitudes_.adjoint(), dims_); }

// ---------------------------------------------------------------------------
// Povm

Povm::Povm(std::vector<Matrix> elements) : elements_(std::move(elements)) {
  require(!elements_.empty(), "Povm: no elements");
  const auto d = elements_.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& e : elements_) {
    require(e.rows() == d && e.cols() == d, "Povm: elements must be square and of equal size");
    require(Operator(e).is_psd(), "Povm: element is not positive semidefinite");
    sum += e;
  }
  require(max_abs(sum - Matrix::Identity(d, d)) <= kTolerance, "Povm: elements do not sum to identity");
}

Povm Povm::from_observable(const Matrix& observable) {
  const auto d = observable.rows();
  const Matrix id = Matrix::Identity(d, d);
  return Povm({(id + observable) / 2.0, (id - observable) / 2.0});
}

Povm Povm::computational(std::size_t dim) {
  std::vector<Matrix> elements;
  for (std::size_t k = 0; k < dim; ++k) {
    Matrix e = Matrix::Zero(dim, dim);
    e(k, k) = 1.0;
    elements.push_back(std::move(e));
  }
  return Povm(std::move(elements));
}

Povm Povm::trivial(std::size_t dim) { return Povm({Matrix::Identity(dim, dim)}); }

Matrix Povm::observable() const {
  require(outcomes() == 2, "Povm: observable requires a binary-outcome measurement");
  return elements_[0] - elements_[1];
}

// ---------------------------------------------------------------------------
// Channel

Channel::Channel(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  require(!kraus_.empty(), "Channel: no Kraus operators");
  for (const auto& k : kraus_)
    require(k.rows() == kraus_.front().rows() && k.cols() == kraus_.front().cols(),
            "Channel: Kraus operators must share a shape");
  require(completeness_error() <= kTolerance, "Channel: Kraus operators are not trace preserving");
}

Channel Channel::identity(std::size_t dim) { return Channel({Matrix::Identity(dim, dim)}); }

Channel Channel::trace_out(std::size_t dim) {
  std::vector<Matrix> kraus;
  for (std::size_t k = 0; k < dim; ++k) {
    Matrix row = Matrix::Zero(1, dim);
    row(0, k) = 1.0;
    kraus.push_back(std::move(row));
  }
  return Channel(std::move(kraus));
}

double Channel::completeness_error() const {
  const auto d = kraus_.front().cols();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : kraus_) sum += k.adjoint() * k;
  return max_abs(sum - Matrix::Identity(d, d));
}

// ---------------------------------------------------------------------------
// Composition and reduction

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator tensor(const Operator& a, const Operator& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return Operator(kron(a.matrix(), b.matrix()), std::move(dims));
}

Ket tensor(const Ket& a, const Ket& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return Ket(kron(a.amplitudes(), b.amplitudes()), std::move(dims));
}

Operator partial_trace(const Operator& rho, const Parts& keep) {
  const auto kept = sorted_unique(keep, rho.num_subsystems(), "partial_trace");
  const auto traced = complement(rho.num_subsystems(), kept);
  const auto ok = offsets(rho.dims(), kept);
  const auto ot = offsets(rho.dims(), traced);
  const auto n = static_cast<Eigen::Index>(ok.size());
  const Matrix& m = rho.matrix();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (auto t : ot) acc += m(ok[i] + t, ok[j] + t);
      out(i, j) = acc;
    }
  Dims dims;
  for (auto p : kept) dims.push_back(rho.dims()[p]);
  return Operator(std::move(out), std::move(dims));
}

Operator partial_transpose(const Operator& rho, std::size_t party) {
  require(party < rho.num_subsystems(), "partial_transpose: subsystem index out of range");
  const auto s = strides(rho.dims())[party];
  const auto d = rho.dims()[party];
  const Matrix& m = rho.matrix();
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto di = static_cast<Eigen::Index>((i / s) % d);
      const auto dj = static_cast<Eigen::Index>((j / s) % d);
      const auto step = static_cast<Eigen::Index>(s);
      out(i + (dj - di) * step, j + (di - dj) * step) = m(i, j);
    }
  return Operator(std::move(out), rho.dims());
}

// ---------------------------------------------------------------------------
// Spectra and entropies

Eigen::VectorXd eigenvalues_hermitian(const Operator& op) {
  require(op.is_hermitian(), "eigenvalues_hermitian: operator is not Hermitian");
  const Matrix h = 0.5 * (op.matrix() + op.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

double spectrum_entropy(const Eigen::VectorXd& spectrum) {
  double h = 0.0;
  for (double lambda : spectrum) {
    if (lambda < -kTolerance) throw std::domain_error("entropy: negative eigenvalue " + std::to_string(lambda));
    if (lambda <= kClipWindow) continue;
    h -= lambda * std::log2(lambda);
  }
  return h;
}

double von_neumann_entropy(const Operator& rho) {
  require(std::abs(rho.trace() - Complex(1.0)) <= kTolerance, "von_neumann_entropy: trace is not 1");
  return spectrum_entropy(eigenvalues_hermitian(rho));
}

double conditional_entropy(const Operator& rho, const Parts& parts, const Parts& given) {
  const auto all = join({&parts, &given});
  sorted_unique(all, rho.num_subsystems(), "conditional_entropy");
  return entropy_of(rho, all) - entropy_of(rho, given);
}

double conditional_mutual_information(const Operator& rho, const Parts& a, const Parts& b, const Parts& e) {
  const auto abe = join({&a, &b, &e});
  sorted_unique(abe, rho.num_subsystems(), "conditional_mutual_information");
  const double value = entropy_of(rho, join({&a, &e})) + entropy_of(rho, join({&b, &e})) - entropy_of(rho, e) -
                       entropy_of(rho, abe);
  if (value < -kTolerance)
    throw std::domain_error("conditional_mutual_information: strong subadditivity violated");
  return std::max(value, 0.0);
}

double mutual_information(const Operator& rho, const Parts& a, const Parts& b) {
  return conditional_mutual_information(rho, a, b, {});
}

Ket purify(const Operator& rho) {
  require(rho.is_density(), "purify: input is not a density operator");
  const Matrix h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  const auto& values = solver.eigenvalues();
  const auto n = values.size();

  std::vector<Eigen::Index> order;
  for (Eigen::Index k = n; k-- > 0;)
    if (values(k) > kClipWindow) order.push_back(k);

  const auto rank = static_cast<Eigen::Index>(order.size());
  Vector psi = Vector::Zero(n * rank);
  for (Eigen::Index r = 0; r < rank; ++r) {
    Vector v = solver.eigenvectors().col(order[r]);
    // Phase convention: the first component of (near-)maximal modulus is real positive.
    const double top = v.cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    while (std::abs(v(pivot)) < top - 1e-9) ++pivot;
    v *= std::conj(v(pivot)) / std::abs(v(pivot));
    const double weight = std::sqrt(values(order[r]));
    for (Eigen::Index i = 0; i < n; ++i) psi(i * rank + r) = weight * v(i);
  }
  psi.normalize();
  Dims dims = rho.dims();
  dims.push_back(static_cast<std::size_t>(rank));
  return Ket(std::move(psi), std::move(dims));
}

// ---------------------------------------------------------------------------
// Measurement and channels

Operator measure_subsystems(const Operator& rho, std::span<const Measurement> assignments) {
  std::vector<Measurement> sorted(assignments.begin(), assignments.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) { return l.party < r.party; });
  Parts measured;
  for (const auto& m : sorted) {
    measured.push_back(m.party);
    require(m.party < rho.num_subsystems(), "measure_subsystems: subsystem index out of range");
    require(m.povm.dim() == rho.dims()[m.party], "measure_subsystems: POVM dimension mismatch");
  }
  sorted_unique(measured, rho.num_subsystems(), "measure_subsystems");
  const auto quantum = complement(rho.num_subsystems(), measured);

  Dims out_dims = rho.dims();
  for (const auto& m : sorted) out_dims[m.party] = m.povm.outcomes();
  const auto out_classical = offsets(out_dims, measured);
  const auto out_quantum = offsets(out_dims, quantum);
  const auto n = static_cast<Eigen::Index>(dims_product(out_dims));
  Matrix out = Matrix::Zero(n, n);

  // Outcome tuples enumerate row-major over `measured`, matching out_classical.
  std::vector<std::size_t> outcome(sorted.size(), 0);
  for (std::size_t idx = 0; idx < out_classical.size(); ++idx) {
    Matrix full = Matrix::Identity(1, 1);
    std::size_t k = 0;
    for (std::size_t p = 0; p < rho.num_subsystems(); ++p) {
      if (k < sorted.size() && sorted[k].party == p) {
        full = kron(full, sorted[k].povm.elements()[outcome[k]]);
        ++k;
      } else {
        full = kron(full, Matrix::Identity(rho.dims()[p], rho.dims()[p]));
      }
    }
    const Operator weighted(full * rho.matrix(), rho.dims());
    const Matrix block = partial_trace(weighted, quantum).matrix();
    for (std::size_t i = 0; i < out_quantum.size(); ++i)
      for (std::size_t j = 0; j < out_quantum.size(); ++j)
        out(out_classical[idx] + out_quantum[i], out_classical[idx] + out_quantum[j]) = block(i, j);

    for (std::size_t k2 = sorted.size(); k2-- > 0;) {
      if (++outcome[k2] < sorted[k2].povm.outcomes()) break;
      outcome[k2] = 0;
    }
  }
  return Operator(std::move(out), std::move(out_dims));
}

Operator measure_subsystems(const Ket& state, std::span<const Measurement> assignments) {
  return measure_subsystems(state.projector(), assignments);
}

Operator apply_channel(const Operator& rho, const Channel& channel, std::size_t party) {
  require(party < rho.num_subsystems(), "apply_channel: subsystem index out of range");
  require(channel.in_dim() == rho.dims()[party], "apply_channel: channel input dimension mismatch");
  Dims out_dims = rho.dims();
  out_dims[party] = channel.out_dim();
  const auto n = static_cast<Eigen::Index>(dims_product(out_dims));
  Matrix out = Matrix::Zero(n, n);
  for (const auto& k : channel.kraus()) {
    const Matrix full = embed(k, rho.dims(), party);
    out += full * rho.matrix() * full.adjoint();
  }
  return Operator(std::move(out), std::move(out_dims));
}

double binary_entropy(double x) {
  if (x < -kTolerance || x > 1.0 + kTolerance)
    throw std::domain_error("binary_entropy: argument outside [0, 1]");
  x = std::clamp(x, 0.0, 1.0);
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

}  // namespace diqkd::qip

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

#include "diqkd/intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "diqkd/nelder_mead.hpp"
#include "diqkd/rng.hpp"

namespace diqkd::intrinsic {

using qip::Matrix;

void SquashSearchConfig::validate(std::size_t in_dim) const {
  if (e_out_dim == 0 || env_dim == 0 || restarts == 0 || max_evals == 0 || !(tol > 0.0))
    throw std::invalid_argument("SquashSearchConfig: all fields must be positive");
  if (e_out_dim * env_dim < in_dim)
    throw std::invalid_argument("SquashSearchConfig: e_out_dim * env_dim must be at least the Eve dimension");
}

std::size_t generator_parameter_count(std::size_t e_out_dim, std::size_t env_dim) {
  const auto d = e_out_dim * env_dim;
  return d * d;
}

namespace {

// Stinespring isometry columns before slicing; no completeness check.
std::vector<Matrix> kraus_from_params(std::span<const double> theta, std::size_t in_dim, std::size_t e_out_dim,
                                      std::size_t env_dim) {
  if (in_dim == 0 || e_out_dim == 0 || env_dim == 0)
    throw std::invalid_argument("channel_from_params: dimensions must be positive");
  if (e_out_dim * env_dim < in_dim)
    throw std::invalid_argument("channel_from_params: e_out_dim * env_dim must be at least in_dim");
  const auto d = static_cast<Eigen::Index>(e_out_dim * env_dim);
  if (theta.size() != generator_parameter_count(e_out_dim, env_dim))
    throw std::invalid_argument("channel_from_params: wrong parameter count");

  // theta layout: d diagonal entries, then (re, im) of each strictly upper entry.
  Matrix h = Matrix::Zero(d, d);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < d; ++i) h(i, i) = theta[k++];
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const qip::Complex z(theta[k], theta[k + 1]);
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  const auto& v = solver.eigenvectors();
  qip::Vector phases(d);
  for (Eigen::Index i = 0; i < d; ++i) phases(i) = std::polar(1.0, solver.eigenvalues()(i));
  const Matrix isometry = (v * phases.asDiagonal() * v.adjoint()).leftCols(static_cast<Eigen::Index>(in_dim));

  std::vector<Matrix> kraus;
  const auto rows = static_cast<Eigen::Index>(e_out_dim);
  for (std::size_t env = 0; env < env_dim; ++env)
    kraus.push_back(isometry.middleRows(static_cast<Eigen::Index>(env) * rows, rows));
  return kraus;
}

double completeness_error(const std::vector<Matrix>& kraus) {
  const auto d = kraus.front().cols();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

struct RestartOutcome {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> theta;
  std::size_t evaluations = 0;
  std::size_t rejected = 0;
};

}  // namespace

qip::Channel channel_from_params(std::span<const double> theta, std::size_t in_dim, std::size_t e_out_dim,
                                 std::size_t env_dim) {
  return qip::Channel(kraus_from_params(theta, in_dim, e_out_dim, env_dim));
}

SquashResult intrinsic_upper(const qip::Operator& rho, const SquashSearchConfig& cfg, TripartiteParts parts) {
  if (std::max({parts.a, parts.b, parts.e}) >= rho.num_subsystems())
    throw std::invalid_argument("intrinsic_upper: party index out of range");
  const auto in_dim = rho.dims()[parts.e];
  cfg.validate(in_dim);

  const qip::Parts a{parts.a}, b{parts.b}, e{parts.e};
  const double identity_value = qip::conditional_mutual_information(rho, a, b, e);
  const auto n_params = generator_parameter_count(cfg.e_out_dim, cfg.env_dim);

  auto run_restart = [&](std::size_t restart) {
    RestartOutcome out;
    auto objective = [&](const std::vector<double>& theta) {
      auto kraus = kraus_from_params(theta, in_dim, cfg.e_out_dim, cfg.env_dim);
      if (completeness_error(kraus) > cfg.tol) {
        ++out.rejected;
        return std::numeric_limits<double>::infinity();
      }
      try {
        const auto squashed = qip::apply_channel(rho, qip::Channel(std::move(kraus)), parts.e);
        return qip::conditional_mutual_information(squashed, a, b, e);
      } catch (const std::domain_error&) {
        ++out.rejected;
        return std::numeric_limits<double>::infinity();
      }
    };
    std::vector<double> start(n_params, 0.0);
    if (restart > 0) {
      Rng rng(stream_seed(cfg.seed, restart));
      for (auto& t : start) t = rng.normal();
    }
    auto result = opt::nelder_mead(objective, std::move(start), {.max_evals = cfg.max_evals});
    out.value = result.value;
    out.theta = std::move(result.x);
    out.evaluations = result.evaluations;
    return out;
  };

  std::vector<RestartOutcome> outcomes(cfg.restarts);
  const std::size_t workers =
      std::min<std::size_t>(cfg.restarts, std::max(1u, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < cfg.restarts; r += workers) outcomes[r] = run_restart(r);
      });
  }

  SquashResult result{identity_value, qip::Channel::identity(in_dim), identity_value,
                      std::numeric_limits<double>::infinity(), 0.0, 1, 0};
  const RestartOutcome* best = nullptr;
  for (const auto& o : outcomes) {
    result.evaluations += o.evaluations;
    result.rejected += o.rejected;
    if (std::isfinite(o.value) && (best == nullptr || o.value < best->value)) best = &o;
  }
  if (best == nullptr) throw std::runtime_error("intrinsic_upper: no valid channel evaluated within budget");

  result.family_value = best->value;
  if (best->value < identity_value) {
    result.best_value = best->value;
    result.best_channel = channel_from_params(best->theta, in_dim, cfg.e_out_dim, cfg.env_dim);
  }
  result.improvement = result.identity_value - result.best_value;
  return result;
}

}  // namespace diqkd::intrinsic

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

#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "diqkd/chsh_attack.hpp"
#include "diqkd/intrinsic.hpp"
#include "diqkd/nelder_mead.hpp"
#include "diqkd/rng.hpp"
#include "test_support.hpp"

using namespace diqkd;
using namespace diqkd::intrinsic;
using qip::Matrix;
using testing::max_abs_diff;

namespace {

// Classical distribution p(a, b, e) over bits as a diagonal operator.
qip::Operator classical_abe(const std::vector<double>& p) {
  Matrix m = Matrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) m(i, i) = p[static_cast<std::size_t>(i)];
  return qip::Operator(m, {2, 2, 2});
}

std::vector<double> random_theta(std::size_t n, Rng& rng) {
  std::vector<double> theta(n);
  for (auto& t : theta) t = rng.normal();
  return theta;
}

SquashSearchConfig small_config(std::size_t e_out, std::size_t env) {
  SquashSearchConfig cfg;
  cfg.e_out_dim = e_out;
  cfg.env_dim = env;
  cfg.restarts = 4;
  cfg.max_evals = 400;
  return cfg;
}

}  // namespace

TEST_SUITE("nelder mead") {
  TEST_CASE("minimizes a shifted quadratic") {
    const auto f = [](std::span<const double> x) { return std::pow(x[0] - 1.0, 2) + 3.0 * std::pow(x[1] + 2.0, 2); };
    const auto r = opt::nelder_mead(f, {0.0, 0.0});
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-4));
    CHECK(r.value < 1e-8);
    CHECK(r.evaluations <= 2000);
  }

  TEST_CASE("respects the evaluation budget") {
    opt::NelderMeadOptions options;
    options.max_evals = 25;
    const auto f = [](std::span<const double> x) { return std::cos(x[0]) + x[1] * x[1] + x[2] * x[2]; };
    CHECK(opt::nelder_mead(f, {0.3, 0.1, 0.2}, options).evaluations <= 25);
  }

  TEST_CASE("non-finite values are treated as infinitely bad") {
    const auto f = [](std::span<const double> x) { return x[0] < 0.0 ? std::nan("") : x[0] * x[0]; };
    const auto r = opt::nelder_mead(f, {1.0});
    CHECK(std::isfinite(r.value));
    CHECK(r.x[0] >= 0.0);
  }
}

TEST_SUITE("channel parametrization") {
  TEST_CASE("parameter count") {
    CHECK(generator_parameter_count(2, 1) == 4);
    CHECK(generator_parameter_count(2, 2) == 16);
    CHECK(generator_parameter_count(3, 2) == 36);
  }

  TEST_CASE("theta = 0 is the identity embedding") {
    const std::vector<double> zero(generator_parameter_count(2, 1), 0.0);
    const auto channel = channel_from_params(zero, 2, 2, 1);
    REQUIRE(channel.kraus().size() == 1);
    CHECK(max_abs_diff(channel.kraus()[0], Matrix::Identity(2, 2)) < 1e-15);

    const std::vector<double> zero3(generator_parameter_count(3, 2), 0.0);
    const auto wide = channel_from_params(zero3, 2, 3, 2);
    Rng rng(5);
    const auto rho = testing::random_density({2, 2, 2}, rng);
    const auto out = qip::apply_channel(rho, wide, 2);
    CHECK(out.dims() == qip::Dims{2, 2, 3});
    CHECK(qip::conditional_mutual_information(out, {0}, {1}, {2}) ==
          doctest::Approx(qip::conditional_mutual_information(rho, {0}, {1}, {2})).epsilon(1e-10));
  }

  TEST_CASE("random parameters give trace-preserving channels") {
    Rng rng(6);
    for (std::size_t e_out : {1, 2, 3, 4})
      for (std::size_t env : {1, 2}) {
        if (e_out * env < 2) continue;
        for (int trial = 0; trial < 10; ++trial) {
          const auto theta = random_theta(generator_parameter_count(e_out, env), rng);
          const auto channel = channel_from_params(theta, 2, e_out, env);
          CHECK(channel.completeness_error() <= 1e-10);
          CHECK(channel.in_dim() == 2);
          CHECK(channel.out_dim() == e_out);
        }
      }
  }

  TEST_CASE("e_out = 1 with env = in is the trace-out channel") {
    Rng rng(7);
    const auto theta = random_theta(generator_parameter_count(1, 2), rng);
    const auto channel = channel_from_params(theta, 2, 1, 2);
    const auto rho = testing::random_density({2, 2, 2}, rng);
    const auto out = qip::apply_channel(rho, channel, 2);
    CHECK(max_abs_diff(qip::partial_trace(out, {0, 1}).matrix(), qip::partial_trace(rho, {0, 1}).matrix()) <
          1e-12);
  }

  TEST_CASE("malformed shapes") {
    const std::vector<double> four(4, 0.0);
    CHECK_THROWS_AS(channel_from_params(four, 2, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(channel_from_params(std::vector<double>(1, 0.0), 2, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(channel_from_params(four, 0, 2, 1), std::invalid_argument);
  }
}

TEST_SUITE("intrinsic_upper") {
  TEST_CASE("configuration validation") {
    const auto rho = chsh::key_ccq_state(chsh::AttackParams(2.5, 0.1));
    SquashSearchConfig cfg = small_config(1, 1);
    CHECK_THROWS_AS(intrinsic_upper(rho, cfg), std::invalid_argument);
    cfg = small_config(2, 1);
    cfg.restarts = 0;
    CHECK_THROWS_AS(intrinsic_upper(rho, cfg), std::invalid_argument);
    cfg = small_config(2, 1);
    cfg.max_evals = 0;
    CHECK_THROWS_AS(intrinsic_upper(rho, cfg), std::invalid_argument);
    CHECK_THROWS_AS(intrinsic_upper(qip::Operator::maximally_mixed({2, 2}), small_config(2, 1)),
                    std::invalid_argument);
  }

  TEST_CASE("product state stays at zero") {
    Rng rng(8);
    const auto ab = testing::random_density({2, 2}, rng);
    const auto rho = qip::tensor(ab, testing::random_density({2}, rng));
    // A pure AB marginal is not needed; I(A;B|E) = I(A;B) for a product with E.
    const auto r = intrinsic_upper(rho, small_config(2, 2));
    CHECK(r.best_value <= r.identity_value + 1e-12);
    CHECK(r.best_value == doctest::Approx(qip::mutual_information(ab, {0}, {1})).epsilon(1e-8));
    const auto independent =
        qip::tensor(qip::tensor(testing::random_density({2}, rng), testing::random_density({2}, rng)),
                    testing::random_density({2}, rng));
    CHECK(std::abs(intrinsic_upper(independent, small_config(2, 1)).best_value) <= 1e-10);
  }

  TEST_CASE("Eve holding a copy of A gives zero") {
    // a = b = e uniformly: I(A;B|E) = 0 before any squashing.
    const auto rho = classical_abe({0.5, 0, 0, 0, 0, 0, 0, 0.5});
    const auto r = intrinsic_upper(rho, small_config(2, 1));
    CHECK(std::abs(r.identity_value) <= 1e-12);
    CHECK(std::abs(r.best_value) <= 1e-12);
  }

  TEST_CASE("squashing removes the XOR correlation") {
    // a, b independent uniform, e = a XOR b: I(A;B|E) = 1 but I(A;B) = 0.
    std::vector<double> p(8, 0.0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) p[static_cast<std::size_t>(4 * a + 2 * b + (a ^ b))] = 0.25;
    const auto rho = classical_abe(p);
    const auto traced = intrinsic_upper(rho, small_config(1, 2));
    CHECK(traced.identity_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(traced.family_value) <= 1e-10);
    CHECK(traced.improvement == doctest::Approx(1.0).epsilon(1e-10));

    auto cfg = small_config(2, 2);
    cfg.restarts = 8;
    cfg.max_evals = 1500;
    const auto searched = intrinsic_upper(rho, cfg);
    CHECK(searched.best_value < 0.05);
    CHECK(searched.best_channel.completeness_error() <= 1e-10);
  }

  TEST_CASE("attack ccq state admits no meaningful squashing") {
    for (double s : {2.3, 2.6}) {
      const chsh::AttackParams p(s, chsh::depolarizing_qber(s));
      const auto rho = chsh::key_ccq_state(p);
      const auto r = intrinsic_upper(rho, small_config(2, 1));
      CHECK(r.identity_value == doctest::Approx(chsh::theorem1_bound(p)).epsilon(1e-9));
      CHECK(r.improvement <= 1e-4);
      CHECK(r.improvement >= 0.0);
      CHECK(r.best_value <= r.identity_value);
    }
  }

  TEST_CASE("e_out = 1 reports I(A;B) as the family value") {
    const chsh::AttackParams p(2.5, 0.05);
    const auto rho = chsh::key_ccq_state(p);
    const auto r = intrinsic_upper(rho, small_config(1, 2));
    CHECK(r.family_value == doctest::Approx(qip::mutual_information(rho, {0}, {1})).epsilon(1e-10));
    CHECK(r.best_value == doctest::Approx(std::min(r.family_value, r.identity_value)));
  }

  TEST_CASE("deterministic for a fixed seed") {
    const auto rho = chsh::key_ccq_state(chsh::AttackParams(2.45, 0.08));
    auto cfg = small_config(3, 2);
    cfg.seed = 42;
    const auto a = intrinsic_upper(rho, cfg);
    const auto b = intrinsic_upper(rho, cfg);
    CHECK(a.best_value == b.best_value);
    CHECK(a.family_value == b.family_value);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.rejected == b.rejected);
  }

  TEST_CASE("custom part assignment") {
    // Eve first, then B, then A.
    Rng rng(9);
    const auto rho = testing::random_density({2, 2, 2}, rng);
    const auto r = intrinsic_upper(rho, small_config(2, 1), {2, 1, 0});
    CHECK(r.identity_value ==
          doctest::Approx(qip::conditional_mutual_information(rho, {2}, {1}, {0})).epsilon(1e-12));
  }
}

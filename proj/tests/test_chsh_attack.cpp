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

#include <doctest.h>

#include "diqkd/chsh_attack.hpp"
#include "diqkd/rng.hpp"
#include "test_support.hpp"

using namespace diqkd;
using namespace diqkd::chsh;
using qip::binary_entropy;
using qip::Matrix;
using testing::max_abs_diff;

namespace {

const double kMaxS = 2.0 * std::sqrt(2.0);

// I(A;B|E) of the key-round state, the numeric route to the closed form.
double cmi_oracle(const AttackParams& p) {
  return qip::conditional_mutual_information(key_ccq_state(p), {0}, {1}, {2});
}

}  // namespace

TEST_CASE("AttackParams validates its domain") {
  CHECK_NOTHROW(AttackParams(2.0, 0.0));
  CHECK_NOTHROW(AttackParams(kMaxS, 0.5));
  CHECK(AttackParams(kMaxS, 0.0).c() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(AttackParams(2.0, 0.0).c() == 0.0);
  CHECK_THROWS_AS(AttackParams(1.99, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(AttackParams(2.9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(AttackParams(2.5, 0.51), std::invalid_argument);
  CHECK_THROWS_AS(AttackParams(2.5, -0.01), std::invalid_argument);
}

TEST_SUITE("attack state") {
  TEST_CASE("S = 2√2 is the pure Bell state") {
    const auto rho = build_attack_state(AttackParams(kMaxS, 0.0));
    Matrix phi = Matrix::Zero(4, 4);
    phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
    CHECK(max_abs_diff(rho.matrix(), phi) < 1e-15);
  }

  TEST_CASE("S = 2 carries one bit of entropy") {
    CHECK(qip::von_neumann_entropy(build_attack_state(AttackParams(2.0, 0.0))) == doctest::Approx(1.0));
  }

  TEST_CASE("spectrum is ((1+C)/2, (1-C)/2, 0, 0)") {
    for (double s : {2.1, 2.4, 2.7}) {
      const AttackParams p(s, 0.1);
      const auto ev = qip::eigenvalues_hermitian(build_attack_state(p));
      CHECK(ev(0) == doctest::Approx(0.5 * (1 + p.c())).epsilon(1e-14));
      CHECK(ev(1) == doctest::Approx(0.5 * (1 - p.c())).epsilon(1e-14));
      CHECK(std::abs(ev(2)) < 1e-14);
      CHECK(std::abs(ev(3)) < 1e-14);
      CHECK(qip::von_neumann_entropy(build_attack_state(p)) ==
            doctest::Approx(binary_entropy(0.5 * (1 + p.c()))).epsilon(1e-12));
    }
  }

  TEST_CASE("tracing Eve from the purification recovers the attack state") {
    const AttackParams p(2.5, 0.2);
    const auto marginal = qip::partial_trace(attack_purification(p).projector(), {0, 1});
    CHECK(max_abs_diff(marginal.matrix(), build_attack_state(p).matrix()) < 1e-15);
  }

  TEST_CASE("generic purification agrees up to Eve's basis") {
    const AttackParams p(2.6, 0.07);
    const auto psi = qip::purify(build_attack_state(p));
    CHECK(psi.dims() == qip::Dims{2, 2, 2});
    CHECK(testing::trace_distance(qip::partial_trace(psi.projector(), {0, 1}), build_attack_state(p)) <= 1e-10);
  }
}

TEST_SUITE("measurements") {
  TEST_CASE("C = 1 gives B0 = (σz + σx)/√2") {
    const auto m = build_measurements(AttackParams(kMaxS, 0.0));
    Matrix expected(2, 2);
    expected << 1, 1, 1, -1;
    expected /= std::sqrt(2.0);
    CHECK(max_abs_diff(m.bob[0].observable(), expected) < 1e-15);
  }

  TEST_CASE("Q = 0 makes the key POVM projective σz") {
    const auto m = build_measurements(AttackParams(2.5, 0.0));
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    CHECK(max_abs_diff(m.bob[2].elements()[0], p0) == 0.0);
  }

  TEST_CASE("Q = 1/2 is pure noise") {
    const auto m = build_measurements(AttackParams(2.5, 0.5));
    for (const auto& e : m.bob[2].elements()) CHECK(max_abs_diff(e, Matrix::Identity(2, 2) * 0.5) == 0.0);
  }
}

TEST_SUITE("chsh_value and qber") {
  TEST_CASE("attack tuple reproduces S = 2√(1+C²)") {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
      const double s = 2.0 + rng.uniform() * (kMaxS - 2.0);
      const double q = 0.5 * rng.uniform();
      const AttackParams p(s, q);
      const auto m = build_measurements(p);
      const double value = chsh_value(build_attack_state(p), m.alice, m.bob);
      CHECK(std::abs(value - 2.0 * std::sqrt(1.0 + p.c() * p.c())) <= 1e-12);
      CHECK(std::abs(value - s) <= 1e-10);
      CHECK(std::abs(qber(build_attack_tuple(p)) - q) <= 1e-10);
    }
  }

  TEST_CASE("classical strategy reaches the local bound") {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    const std::array<qip::Povm, 2> obs{qip::Povm::from_observable(z), qip::Povm::from_observable(z)};
    Matrix rho = Matrix::Zero(4, 4);
    rho(0, 0) = 1.0;
    CHECK(chsh_value(qip::Operator(rho, {2, 2}), obs, obs) == doctest::Approx(2.0));
  }

  TEST_CASE("Bell state with optimal angles reaches Tsirelson's bound") {
    const auto p = AttackParams(kMaxS, 0.0);
    const auto m = build_measurements(p);
    const double s = chsh_value(build_attack_state(p), m.alice, m.bob);
    CHECK(s == doctest::Approx(kMaxS).epsilon(1e-14));
    CHECK(0.5 + s / 8.0 == doctest::Approx(std::pow(std::cos(M_PI / 8), 2)).epsilon(1e-14));
  }

  TEST_CASE("non-qubit parties are rejected") {
    const auto m = build_measurements(AttackParams(2.5, 0.0));
    CHECK_THROWS_AS(chsh_value(qip::Operator::maximally_mixed({3, 3}), m.alice, m.bob), std::invalid_argument);
  }

  TEST_CASE("qber endpoints") {
    for (double q : {0.0, 0.05, 0.1, 0.25, 0.5})
      CHECK(std::abs(qber(build_attack_tuple(AttackParams(2.3, q))) - q) <= 1e-12);
  }
}

TEST_SUITE("key ccq state") {
  TEST_CASE("measured purification equals the closed form entrywise") {
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
      const AttackParams p(2.0 + rng.uniform() * (kMaxS - 2.0), 0.5 * rng.uniform());
      const auto measured = measured_ccq_state(build_attack_tuple(p), kKeyInputAlice, kKeyInputBob);
      CHECK(measured.dims() == qip::Dims{2, 2, 2});
      CHECK(max_abs_diff(measured.matrix(), key_ccq_state(p).matrix()) <= 1e-12);
    }
  }

  TEST_CASE("spectral purification yields the same ccq state") {
    for (double s : {2.2, 2.5, 2.8}) {
      const AttackParams p(s, 0.13);
      auto tuple = build_attack_tuple(p);
      tuple.state = qip::purify(build_attack_state(p));
      const auto measured = measured_ccq_state(tuple, kKeyInputAlice, kKeyInputBob);
      CHECK(max_abs_diff(measured.matrix(), key_ccq_state(p).matrix()) <= 1e-12);
    }
  }

  TEST_CASE("Q = 0, C = 1: correlated bits with a fixed pure Eve") {
    const auto rho = key_ccq_state(AttackParams(kMaxS, 0.0));
    const auto ab = qip::partial_trace(rho, {0, 1});
    CHECK(ab.matrix()(0, 0).real() == doctest::Approx(0.5));
    CHECK(ab.matrix()(3, 3).real() == doctest::Approx(0.5));
    const auto e = qip::partial_trace(rho, {2});
    CHECK(e.matrix()(0, 0).real() == doctest::Approx(1.0));
    CHECK(qip::mutual_information(rho, {0, 1}, {2}) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("Eve blocks have unit trace") {
    const auto rho = key_ccq_state(AttackParams(2.4, 0.2));
    const auto& m = rho.matrix();
    for (int ab = 0; ab < 4; ++ab) {
      const double w = (ab == 0 || ab == 3) ? 0.4 : 0.1;
      CHECK(m.block(2 * ab, 2 * ab, 2, 2).trace().real() / w == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_SUITE("closed-form bounds") {
  TEST_CASE("closed-form bound endpoints") {
    CHECK(theorem1_bound(AttackParams(kMaxS, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
    for (double q : {0.0, 0.1, 0.3, 0.5}) {
      CHECK(std::abs(theorem1_bound(AttackParams(2.0, q))) <= 1e-12);
      CHECK(std::abs(theorem1_bound(AttackParams(kMaxS, q)) - (1.0 - binary_entropy(q))) <= 1e-12);
    }
  }

  TEST_CASE("closed-form bound at (2.4, 0.05) matches the numeric oracle") {
    const AttackParams p(2.4, 0.05);
    const double oracle = cmi_oracle(p);
    // Frozen from the oracle (independently reproduced with a NumPy script).
    CHECK(oracle == doctest::Approx(0.240627662920).epsilon(1e-10));
    CHECK(std::abs(theorem1_bound(p) - oracle) <= 1e-9);
  }

  TEST_CASE("closed-form bound equals I(A;B|E) on a 20x20 grid") {
    for (double s : linspace(2.0, kMaxS, 20))
      for (double q : linspace(0.0, 0.5, 20)) {
        const AttackParams p(s, q);
        CHECK(std::abs(theorem1_bound(p) - cmi_oracle(p)) <= 1e-9);
      }
  }

  TEST_CASE("one-parameter bound matches the two-parameter bound under depolarizing noise") {
    CHECK(corollary1_bound(kMaxS) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(corollary1_bound(2.0)) <= 1e-12);
    for (double s : linspace(2.0, kMaxS, 50))
      CHECK(std::abs(corollary1_bound(s) - theorem1_bound(AttackParams(s, depolarizing_qber(s)))) <= 1e-12);
  }
}

TEST_SUITE("rates") {
  TEST_CASE("endpoints") {
    CHECK(lower_bound_dw(AttackParams(kMaxS, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entropy_rate(AttackParams(kMaxS, 0.3)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(entropy_rate(AttackParams(2.0, 0.3))) <= 1e-12);
  }

  TEST_CASE("S = 2, Q = 0 reports the raw non-positive value") {
    // H(A|E) = 0 and H(A|B) = 0 at this corner.
    const double v = lower_bound_dw(AttackParams(2.0, 0.0));
    CHECK(v <= 1e-12);
    CHECK(std::abs(v) <= 1e-12);
    CHECK(lower_bound_dw(AttackParams(2.0, 0.25)) < 0.0);
  }

  TEST_CASE("lower bound matches its closed form") {
    for (double s : linspace(2.0, kMaxS, 11))
      for (double q : {0.0, 0.03, 0.2}) {
        const AttackParams p(s, q);
        CHECK(std::abs(lower_bound_dw(p) - (1.0 - binary_entropy(0.5 * (1 + p.c())) - binary_entropy(q))) <= 1e-12);
      }
  }

  TEST_CASE("entropy rate is monotone in S at Q = 0") {
    double previous = -1.0;
    for (double s : linspace(2.0, kMaxS, 100)) {
      const double v = entropy_rate(AttackParams(s, 0.0));
      CHECK(v >= previous - 1e-9);
      previous = v;
    }
  }

  TEST_CASE("noise threshold near 7.1%") {
    const double s_star = noise_threshold_violation();
    const double q_star = depolarizing_qber(s_star);
    CHECK(q_star >= 0.070);
    CHECK(q_star <= 0.072);
    CHECK(std::abs(lower_bound_dw(depolarizing_params(s_star))) <= 1e-8);
  }
}

TEST_SUITE("two-input bound") {
  TEST_CASE("S = 2√2 gives 1") { CHECK(appendixB_bound(kMaxS) == doctest::Approx(1.0).epsilon(1e-12)); }

  TEST_CASE("dominates every input pair") {
    for (double s : linspace(2.0, kMaxS, 15)) {
      const auto p = depolarizing_params(s);
      const double bound = appendixB_bound(p);
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 3; ++y) CHECK(bound >= pair_cmi(p, x, y));
    }
  }

  TEST_CASE("crossover near 2.59, branches switch there") {
    const double s_star = appendixB_crossover();
    CHECK(s_star >= 2.57);
    CHECK(s_star <= 2.61);
    const auto below = depolarizing_params(s_star - 0.05);
    const auto above = depolarizing_params(s_star + 0.05);
    CHECK(appendixB_bound(below) == doctest::Approx(pair_cmi(below, 1, 1)).epsilon(1e-12));
    CHECK(appendixB_bound(above) == doctest::Approx(pair_cmi(above, 0, 2)).epsilon(1e-12));
  }
}

TEST_SUITE("sweeps") {
  TEST_CASE("2x2 corner grid") {
    const auto grid = sweep_surface(2, 2);
    REQUIRE(grid.size() == 4);
    CHECK(grid[0].s == 2.0);
    CHECK(grid[0].q == 0.0);
    CHECK(std::abs(grid[0].upper_thm1) <= 1e-12);
    CHECK(std::abs(grid[1].upper_thm1) <= 1e-12);
    CHECK(grid[2].upper_thm1 == doctest::Approx(1.0));
    // 1 + h(1) − h(1/2) − h(1) = 0 at (2√2, 1/2).
    CHECK(std::abs(grid[3].upper_thm1) <= 1e-12);
  }

  TEST_CASE("curve ordering") {
    for (const auto& p : sweep_curve(50)) {
      CHECK(p.lower <= p.upper_thm1 + 1e-9);
      CHECK(p.lower <= p.entropy_rate + 1e-9);
      CHECK(p.entropy_rate <= 1.0 + 1e-9);
      CHECK(p.upper_thm1 >= 0.0);
      CHECK(p.upper_appB >= 0.0);
      CHECK(p.lower >= -1.0);
    }
  }

  TEST_CASE("malformed grid") {
    CHECK_THROWS_AS(sweep_surface(1, 5), std::invalid_argument);
    CHECK_THROWS_AS(sweep_curve(0), std::invalid_argument);
  }
}

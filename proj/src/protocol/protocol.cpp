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

#include "diqkd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "diqkd/chsh_attack.hpp"
#include "diqkd/format.hpp"
#include "diqkd/rng.hpp"

namespace diqkd::protocol {

using qip::Matrix;

Correlation::Correlation(std::size_t inputs_a, std::size_t inputs_b, std::size_t outputs_a, std::size_t outputs_b)
    : inputs_a_(inputs_a), inputs_b_(inputs_b), outputs_a_(outputs_a), outputs_b_(outputs_b),
      table_(inputs_a * inputs_b * outputs_a * outputs_b, 0.0) {
  if (table_.empty()) throw std::invalid_argument("Correlation: alphabet sizes must be positive");
}

std::size_t Correlation::index(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
  if (x >= inputs_a_ || y >= inputs_b_ || a >= outputs_a_ || b >= outputs_b_)
    throw std::out_of_range("Correlation: index out of range");
  return ((x * inputs_b_ + y) * outputs_a_ + a) * outputs_b_ + b;
}

double Correlation::operator()(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
  return table_[index(x, y, a, b)];
}

double& Correlation::at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) { return table_[index(x, y, a, b)]; }

double Correlation::normalization_error() const {
  double worst = 0.0;
  for (std::size_t x = 0; x < inputs_a_; ++x)
    for (std::size_t y = 0; y < inputs_b_; ++y) {
      double sum = 0.0;
      for (std::size_t a = 0; a < outputs_a_; ++a)
        for (std::size_t b = 0; b < outputs_b_; ++b) sum += (*this)(x, y, a, b);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  return worst;
}

void Correlation::validate(double tol) const {
  if (std::any_of(table_.begin(), table_.end(), [](double v) { return !(v >= 0.0); }))
    throw std::invalid_argument("Correlation: negative or non-finite entry");
  if (normalization_error() > tol) throw std::invalid_argument("Correlation: not normalized for every input pair");
}

Correlation correlation_from_tuple(const qip::Operator& rho_ab, std::span<const qip::Povm> alice,
                                   std::span<const qip::Povm> bob) {
  if (rho_ab.num_subsystems() != 2) throw std::invalid_argument("correlation_from_tuple: expected a bipartite state");
  if (alice.empty() || bob.empty()) throw std::invalid_argument("correlation_from_tuple: no measurements");
  std::size_t out_a = 0, out_b = 0;
  for (const auto& m : alice) {
    if (m.dim() != rho_ab.dims()[0]) throw std::invalid_argument("correlation_from_tuple: Alice dimension mismatch");
    out_a = std::max(out_a, m.outcomes());
  }
  for (const auto& m : bob) {
    if (m.dim() != rho_ab.dims()[1]) throw std::invalid_argument("correlation_from_tuple: Bob dimension mismatch");
    out_b = std::max(out_b, m.outcomes());
  }
  Correlation p(alice.size(), bob.size(), out_a, out_b);
  for (std::size_t x = 0; x < alice.size(); ++x)
    for (std::size_t y = 0; y < bob.size(); ++y)
      for (std::size_t a = 0; a < alice[x].outcomes(); ++a)
        for (std::size_t b = 0; b < bob[y].outcomes(); ++b) {
          const Matrix joint = qip::kron(alice[x].elements()[a], bob[y].elements()[b]);
          p.at(x, y, a, b) = std::max(0.0, (joint * rho_ab.matrix()).trace().real());
        }
  return p;
}

namespace {

void require_chsh(const Correlation& p) {
  if (p.inputs_a() < 2 || p.inputs_b() < 2 || p.outputs_a() != 2 || p.outputs_b() != 2)
    throw std::invalid_argument("CHSH functional needs binary outputs and at least two inputs per party");
}

}  // namespace

double omega_of_p(const Correlation& p) {
  require_chsh(p);
  double total = 0.0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) total += p(x, y, a, b);
  return total / 4.0;
}

double s_of_p(const Correlation& p) { return 8.0 * omega_of_p(p) - 4.0; }

double q_of_p(const Correlation& p, std::size_t key_x, std::size_t key_y) {
  if (key_x >= p.inputs_a() || key_y >= p.inputs_b()) throw std::invalid_argument("q_of_p: key inputs out of range");
  double err = 0.0;
  for (std::size_t a = 0; a < p.outputs_a(); ++a)
    for (std::size_t b = 0; b < p.outputs_b(); ++b)
      if (a != b) err += p(key_x, key_y, a, b);
  return err;
}

double no_signalling_check(const Correlation& p) {
  double margin = 0.0;
  // Alice's marginal must not depend on y.
  for (std::size_t x = 0; x < p.inputs_a(); ++x)
    for (std::size_t a = 0; a < p.outputs_a(); ++a) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t y = 0; y < p.inputs_b(); ++y) {
        double m = 0.0;
        for (std::size_t b = 0; b < p.outputs_b(); ++b) m += p(x, y, a, b);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      margin = std::max(margin, hi - lo);
    }
  for (std::size_t y = 0; y < p.inputs_b(); ++y)
    for (std::size_t b = 0; b < p.outputs_b(); ++b) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t x = 0; x < p.inputs_a(); ++x) {
        double m = 0.0;
        for (std::size_t a = 0; a < p.outputs_a(); ++a) m += p(x, y, a, b);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      margin = std::max(margin, hi - lo);
    }
  return margin;
}

Correlation pr_box() {
  Correlation p(2, 2, 2, 2);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t a = 0; a < 2; ++a) p.at(x, y, a, a ^ (x & y)) = 0.5;
  return p;
}

Correlation classical_deterministic() {
  Correlation p(2, 3, 2, 2);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 3; ++y) p.at(x, y, 0, 0) = 1.0;
  return p;
}

Correlation attack_device(double s, double q) {
  const chsh::AttackParams params(s, q);
  const auto m = chsh::build_measurements(params);
  return correlation_from_tuple(chsh::build_attack_state(params), m.alice, m.bob);
}

Correlation depolarizing_device(double nu) {
  if (!(nu >= 0.0 && nu <= 4.0 / 3.0)) throw std::invalid_argument("depolarizing_device: nu must lie in [0, 4/3]");
  qip::Vector phi = qip::Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  const Matrix tau = (1.0 - nu) * phi * phi.adjoint() + nu * Matrix::Identity(4, 4) / 4.0;
  // Optimal CHSH settings are the attack settings at C = 1; the key
  // measurement is noiseless σ_z.
  const auto m = chsh::build_measurements(chsh::AttackParams(chsh::max_violation(), 0.0));
  return correlation_from_tuple(qip::Operator(tau, {2, 2}), m.alice, m.bob);
}

Correlation read_correlation_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("correlation file: empty");
  auto trim = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    return s;
  };
  if (trim(line) != "x,y,a,b,p") throw std::invalid_argument("correlation file: header must be x,y,a,b,p");
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, double> entries;
  std::size_t nx = 0, ny = 0, na = 0, nb = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    long long x, y, a, b;
    double value;
    char c1, c2, c3, c4;
    if (!(row >> x >> c1 >> y >> c2 >> a >> c3 >> b >> c4 >> value) || c1 != ',' || c2 != ',' || c3 != ',' ||
        c4 != ',' || x < 0 || y < 0 || a < 0 || b < 0 || !row.eof())
      throw std::invalid_argument("correlation file: malformed row " + std::to_string(line_no));
    const auto key = std::make_tuple<std::size_t, std::size_t, std::size_t, std::size_t>(x, y, a, b);
    if (!entries.emplace(key, value).second)
      throw std::invalid_argument("correlation file: duplicate row " + std::to_string(line_no));
    nx = std::max<std::size_t>(nx, x + 1);
    ny = std::max<std::size_t>(ny, y + 1);
    na = std::max<std::size_t>(na, a + 1);
    nb = std::max<std::size_t>(nb, b + 1);
  }
  if (entries.empty()) throw std::invalid_argument("correlation file: no rows");
  Correlation p(nx, ny, na, nb);
  for (const auto& [key, value] : entries) {
    const auto [x, y, a, b] = key;
    p.at(x, y, a, b) = value;
  }
  p.validate(1e-9);
  return p;
}

void write_correlation_csv(std::ostream& out, const Correlation& p) {
  out << "x,y,a,b,p\n";
  for (std::size_t x = 0; x < p.inputs_a(); ++x)
    for (std::size_t y = 0; y < p.inputs_b(); ++y)
      for (std::size_t a = 0; a < p.outputs_a(); ++a)
        for (std::size_t b = 0; b < p.outputs_b(); ++b)
          out << x << ',' << y << ',' << a << ',' << b << ',' << format_number(p(x, y, a, b)) << '\n';
}

void ProtocolConfig::validate() const {
  if (n < 1) throw std::invalid_argument("ProtocolConfig: n must be at least 1");
  if (!(test_prob >= 0.0 && test_prob <= 1.0)) throw std::invalid_argument("ProtocolConfig: test_prob outside [0, 1]");
  if (!(omega_exp >= 0.0 && omega_exp <= 1.0)) throw std::invalid_argument("ProtocolConfig: omega_exp outside [0, 1]");
}

double default_rate(double s, double q) {
  if (!std::isfinite(s) || !std::isfinite(q)) return 0.0;
  const chsh::AttackParams p(std::clamp(s, 2.0, chsh::max_violation()), std::clamp(q, 0.0, 0.5));
  return chsh::lower_bound_dw(p);
}

double asymptotic_key_bits(const SimReport& report, const RateFn& rate) {
  if (report.abort || !report.omega_defined || !report.qber_defined || report.key_rounds == 0) return 0.0;
  return static_cast<double>(report.key_rounds) * std::max(0.0, rate(report.observed_s(), report.observed_qber));
}

namespace {

// Cumulative distribution over (a, b) for each (x, y), row-major in (a, b).
struct Sampler {
  explicit Sampler(const Correlation& p) : p_(p), cdf_(p.inputs_a() * p.inputs_b()) {
    for (std::size_t x = 0; x < p.inputs_a(); ++x)
      for (std::size_t y = 0; y < p.inputs_b(); ++y) {
        auto& c = cdf_[x * p.inputs_b() + y];
        double acc = 0.0;
        for (std::size_t a = 0; a < p.outputs_a(); ++a)
          for (std::size_t b = 0; b < p.outputs_b(); ++b) c.push_back(acc += p(x, y, a, b));
      }
  }

  std::pair<std::size_t, std::size_t> draw(std::size_t x, std::size_t y, Rng& rng) const {
    const auto& c = cdf_[x * p_.inputs_b() + y];
    const double u = rng.uniform() * c.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), u) - c.begin());
    const auto idx = std::min(k, c.size() - 1);
    return {idx / p_.outputs_b(), idx % p_.outputs_b()};
  }

  const Correlation& p_;
  std::vector<std::vector<double>> cdf_;
};

}  // namespace

SimReport run_protocol(const Correlation& p, const ProtocolConfig& cfg) {
  cfg.validate();
  p.validate();
  if (cfg.test_prob > 0.0) require_chsh(p);
  if (cfg.test_prob < 1.0 && (cfg.key_x >= p.inputs_a() || cfg.key_y >= p.inputs_b()))
    throw std::invalid_argument("run_protocol: key inputs not available on this device");

  const Sampler sampler(p);
  Rng rng(cfg.seed);
  SimReport r;
  if (cfg.test_prob > 0.0) r.test_counts.assign(16, 0);
  for (std::uint64_t i = 0; i < cfg.n; ++i) {
    if (rng.bernoulli(cfg.test_prob)) {
      const auto x = static_cast<std::size_t>(rng.below(2));
      const auto y = static_cast<std::size_t>(rng.below(2));
      const auto [a, b] = sampler.draw(x, y, rng);
      ++r.test_rounds;
      ++r.test_counts[((2 * x + y) * 2 + a) * 2 + b];
      if ((a ^ b) == (x & y)) ++r.wins;
    } else {
      const auto [a, b] = sampler.draw(cfg.key_x, cfg.key_y, rng);
      ++r.key_rounds;
      if (a != b) ++r.key_errors;
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.omega_defined = r.test_rounds > 0;
  r.observed_omega = r.omega_defined ? static_cast<double>(r.wins) / static_cast<double>(r.test_rounds) : nan;
  r.qber_defined = r.key_rounds > 0;
  r.observed_qber = r.qber_defined ? static_cast<double>(r.key_errors) / static_cast<double>(r.key_rounds) : nan;
  r.abort = !r.omega_defined || r.observed_omega < cfg.omega_exp;
  r.asymptotic_key_bits = asymptotic_key_bits(r);
  return r;
}

std::string SimReport::to_json() const {
  auto num = [](double v, bool defined) { return defined ? format_number(v) : std::string("null"); };
  std::ostringstream out;
  out << "{\n"
      << "  \"test_rounds\": " << test_rounds << ",\n"
      << "  \"key_rounds\": " << key_rounds << ",\n"
      << "  \"wins\": " << wins << ",\n"
      << "  \"key_errors\": " << key_errors << ",\n"
      << "  \"observed_omega\": " << num(observed_omega, omega_defined) << ",\n"
      << "  \"observed_s\": " << num(observed_s(), omega_defined) << ",\n"
      << "  \"observed_qber\": " << num(observed_qber, qber_defined) << ",\n"
      << "  \"abort\": " << (abort ? "true" : "false") << ",\n"
      << "  \"asymptotic_key_bits\": " << format_number(asymptotic_key_bits) << "\n"
      << "}\n";
  return out.str();
}

std::string SimReport::to_text() const {
  auto num = [](double v, bool defined) { return defined ? format_number(v) : std::string("undefined"); };
  std::ostringstream out;
  out << "test rounds:         " << test_rounds << "\n"
      << "key rounds:          " << key_rounds << "\n"
      << "CHSH wins:           " << wins << "\n"
      << "key errors:          " << key_errors << "\n"
      << "observed omega:      " << num(observed_omega, omega_defined) << "\n"
      << "observed S:          " << num(observed_s(), omega_defined) << "\n"
      << "observed QBER:       " << num(observed_qber, qber_defined) << "\n"
      << "abort:               " << (abort ? "yes" : "no") << "\n"
      << "asymptotic key bits: " << format_number(asymptotic_key_bits) << "\n";
  return out.str();
}

}  // namespace diqkd::protocol

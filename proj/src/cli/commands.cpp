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

#include "diqkd/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "diqkd/chsh_attack.hpp"
#include "diqkd/format.hpp"
#include "diqkd/intrinsic.hpp"
#include "diqkd/peres.hpp"
#include "diqkd/protocol.hpp"

namespace diqkd::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Manifest

json RunManifest::to_json() const {
  json j;
  j["tool"] = kToolName;
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  j["parameters"] = parameters;
  j["outputs"] = outputs;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("tool", "") != kToolName) throw std::invalid_argument("manifest: not a diqkd manifest");
  RunManifest m;
  m.subcommand = j.at("subcommand").get<std::string>();
  m.parameters = j.at("parameters");
  m.seed = j.value("seed", std::uint64_t{0});
  m.version = j.value("version", std::string(kToolVersion));
  m.outputs = j.value("outputs", std::vector<std::string>{});
  return m;
}

namespace {

json to_params(const BoundsArgs& a) {
  return {{"curve_points", a.curve_points}, {"grid_s", a.grid_s}, {"grid_q", a.grid_q}};
}
BoundsArgs bounds_from(const nlohmann::json& j) {
  BoundsArgs a;
  a.curve_points = j.at("curve_points").get<std::size_t>();
  a.grid_s = j.at("grid_s").get<std::size_t>();
  a.grid_q = j.at("grid_q").get<std::size_t>();
  return a;
}

json to_params(const PeresArgs& a) { return {{"q", a.q}, {"tol", a.tol}, {"format", a.format}}; }
PeresArgs peres_from(const nlohmann::json& j) {
  return PeresArgs{j.at("q").get<double>(), j.at("tol").get<double>(), j.at("format").get<std::string>()};
}

json to_params(const SimulateArgs& a) {
  json j = {{"device", a.device}, {"S", a.s},       {"Q", a.q},
            {"nu", a.nu},         {"n", a.n},       {"seed", a.seed},
            {"omega_exp", nullptr}, {"test_prob", a.test_prob}, {"correlation_file", a.correlation_file},
            {"format", a.format}};
  if (a.omega_exp) j["omega_exp"] = *a.omega_exp;
  return j;
}
SimulateArgs simulate_from(const nlohmann::json& j) {
  SimulateArgs a;
  a.device = j.at("device").get<std::string>();
  a.s = j.at("S").get<double>();
  a.q = j.at("Q").get<double>();
  a.nu = j.at("nu").get<double>();
  a.n = j.at("n").get<std::uint64_t>();
  a.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("omega_exp").is_null()) a.omega_exp = j.at("omega_exp").get<double>();
  a.test_prob = j.at("test_prob").get<double>();
  a.correlation_file = j.at("correlation_file").get<std::string>();
  a.format = j.at("format").get<std::string>();
  return a;
}

json to_params(const SquashArgs& a) {
  return {{"s_points", a.s_points}, {"e_out", a.e_out},         {"env", a.env},
          {"restarts", a.restarts}, {"max_evals", a.max_evals}, {"seed", a.seed}};
}
SquashArgs squash_from(const nlohmann::json& j) {
  SquashArgs a;
  a.s_points = j.at("s_points").get<std::size_t>();
  a.e_out = j.at("e_out").get<std::vector<std::size_t>>();
  a.env = j.at("env").get<std::vector<std::size_t>>();
  a.restarts = j.at("restarts").get<std::size_t>();
  a.max_evals = j.at("max_evals").get<std::size_t>();
  a.seed = j.at("seed").get<std::uint64_t>();
  return a;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  write_file(dir / (m.subcommand + "_manifest.json"), m.to_json().dump(2) + "\n");
}

std::string join_row(std::initializer_list<double> values) {
  std::string row;
  for (double v : values) {
    if (!row.empty()) row += ',';
    row += format_number(v);
  }
  return row + '\n';
}

protocol::Correlation make_device(const SimulateArgs& a) {
  if (a.device == "attack") return protocol::attack_device(a.s, a.q);
  if (a.device == "depolarizing") return protocol::depolarizing_device(a.nu);
  if (a.device == "classical") return protocol::classical_deterministic();
  if (a.device == "file") {
    std::ifstream in(a.correlation_file);
    if (!in) throw std::runtime_error("cannot read correlation file " + a.correlation_file);
    return protocol::read_correlation_csv(in);
  }
  throw std::invalid_argument("unknown device '" + a.device + "'");
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  std::size_t s = 0, q = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument("");
    std::size_t used = 0;
    s = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("");
    q = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("--grid expects <S points>x<Q points>, e.g. 100x100");
  }
  return {s, q};
}

}  // namespace

fs::path resolve_out_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_bounds(const BoundsArgs& args, const fs::path& out_dir) {
  if (args.grid_s < 2 || args.grid_q < 2 || args.curve_points < 2)
    throw std::invalid_argument("bounds: grids need at least 2 points per axis");
  prepare_dir(out_dir);

  std::string surface = "S,Q,upper\n";
  for (double s : chsh::linspace(2.0, chsh::max_violation(), args.grid_s))
    for (double q : chsh::linspace(0.0, 0.5, args.grid_q))
      surface += join_row({s, q, chsh::theorem1_bound(chsh::AttackParams(s, q))});

  std::string curves = "S,lower,entropy_rate,upper_thm1,upper_appB\n";
  for (const auto& p : chsh::sweep_curve(args.curve_points))
    curves += join_row({p.s, p.lower, p.entropy_rate, p.upper_thm1, p.upper_appB});

  write_file(out_dir / "surface.csv", surface);
  write_file(out_dir / "curves.csv", curves);
  write_manifest(out_dir, {"bounds", to_params(args), 0, kToolVersion, {"surface.csv", "curves.csv"}});
  return 0;
}

int cmd_peres(const PeresArgs& args, const fs::path& out_dir) {
  if (args.format != "text" && args.format != "csv") throw std::invalid_argument("peres: --format must be text or csv");
  prepare_dir(out_dir);
  const auto report = peres::evidence_report(args.q);
  const std::string name = args.format == "csv" ? "peres_report.csv" : "peres_report.txt";
  write_file(out_dir / name, args.format == "csv" ? report.to_csv() : report.to_text());
  write_manifest(out_dir, {"peres", to_params(args), 0, kToolVersion, {name}});
  return report.supports_no_key(args.tol) ? 0 : 1;
}

int cmd_simulate(const SimulateArgs& args_in, const fs::path& out_dir) {
  if (args_in.format != "json" && args_in.format != "text")
    throw std::invalid_argument("simulate: --format must be json or text");
  SimulateArgs args = args_in;
  const auto device = make_device(args);
  if (!args.omega_exp) {
    const double omega = protocol::omega_of_p(device);
    const double expected_tests = static_cast<double>(args.n) * args.test_prob;
    const double sigma = expected_tests > 0.0 ? std::sqrt(omega * (1.0 - omega) / expected_tests) : 0.0;
    args.omega_exp = omega - 3.0 * sigma;
  }
  protocol::ProtocolConfig cfg;
  cfg.n = args.n;
  cfg.test_prob = args.test_prob;
  cfg.omega_exp = *args.omega_exp;
  cfg.seed = args.seed;
  const auto report = protocol::run_protocol(device, cfg);

  prepare_dir(out_dir);
  const std::string name = args.format == "json" ? "simulate_report.json" : "simulate_report.txt";
  write_file(out_dir / name, args.format == "json" ? report.to_json() : report.to_text());
  write_manifest(out_dir, {"simulate", to_params(args), args.seed, kToolVersion, {name}});
  return 0;
}

int cmd_squash(const SquashArgs& args, const fs::path& out_dir) {
  constexpr std::size_t kEveDim = 2;
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  for (auto e : args.e_out)
    for (auto v : args.env)
      if (e * v >= kEveDim && e > 0) shapes.emplace_back(e, v);
  if (shapes.empty()) throw std::invalid_argument("squash: no feasible (e_out, env) pair; need e_out * env >= 2");

  std::string table = "S,Q,e_out,env,identity_value,family_value,best_value,improvement\n";
  for (double s : chsh::linspace(2.0, chsh::max_violation(), args.s_points)) {
    const auto params = chsh::depolarizing_params(s);
    const auto rho = chsh::key_ccq_state(params);
    for (const auto& [e_out, env] : shapes) {
      intrinsic::SquashSearchConfig cfg;
      cfg.e_out_dim = e_out;
      cfg.env_dim = env;
      cfg.restarts = args.restarts;
      cfg.max_evals = args.max_evals;
      cfg.seed = args.seed;
      const auto r = intrinsic::intrinsic_upper(rho, cfg);
      table += format_number(params.s()) + ',' + format_number(params.q()) + ',' + std::to_string(e_out) + ',' +
               std::to_string(env) + ',' +
               join_row({r.identity_value, r.family_value, r.best_value, r.improvement});
    }
  }
  prepare_dir(out_dir);
  write_file(out_dir / "squash.csv", table);
  write_manifest(out_dir, {"squash", to_params(args), args.seed, kToolVersion, {"squash.csv"}});
  return 0;
}

int cmd_replay(const fs::path& manifest_path, const fs::path& out_dir) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot read manifest " + manifest_path.string());
  const auto m = RunManifest::from_json(nlohmann::json::parse(in));
  const fs::path dir = out_dir.empty() ? manifest_path.parent_path() : out_dir;
  const fs::path target = dir.empty() ? fs::path(".") : dir;
  if (m.subcommand == "bounds") return cmd_bounds(bounds_from(m.parameters), target);
  if (m.subcommand == "peres") return cmd_peres(peres_from(m.parameters), target);
  if (m.subcommand == "simulate") return cmd_simulate(simulate_from(m.parameters), target);
  if (m.subcommand == "squash") return cmd_squash(squash_from(m.parameters), target);
  throw std::invalid_argument("manifest: unknown subcommand '" + m.subcommand + "'");
}

// ---------------------------------------------------------------------------
// Entry point

int run(int argc, char** argv) {
  CLI::App app{"Bounds and simulations for CHSH-based device-independent QKD"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string out;
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out, std::string("Output directory (default: $") + kOutDirEnv + " or .)");
  };

  BoundsArgs bounds;
  std::string grid = "100x100";
  auto* b = app.add_subcommand("bounds", "Key-rate bounds: surface over (S, Q) and curves over S");
  b->add_option("--grid", grid, "Surface grid as <S points>x<Q points>")->capture_default_str();
  b->add_option("--points", bounds.curve_points, "Points along S for the curves")->capture_default_str();
  add_out(b);

  PeresArgs peres;
  auto* p = app.add_subcommand("peres", "One-way key rates of the bound-entangled two-qutrit state");
  p->add_option("--q", peres.q, "Alice measurement parameter")->capture_default_str();
  p->add_option("--tol", peres.tol, "Tolerance for the exit-status assertion")->capture_default_str();
  p->add_option("--format", peres.format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
  add_out(p);

  SimulateArgs sim;
  double omega_exp = 0.0;
  auto* s = app.add_subcommand("simulate", "Monte Carlo run of the protocol's data generation and estimation");
  s->add_option("--device", sim.device, "attack, depolarizing, classical or file")
      ->check(CLI::IsMember({"attack", "depolarizing", "classical", "file"}))
      ->capture_default_str();
  s->add_option("--S", sim.s, "CHSH violation of the attack device")->capture_default_str();
  s->add_option("--Q", sim.q, "Bit error rate of the attack device")->capture_default_str();
  s->add_option("--nu", sim.nu, "Depolarizing strength")->capture_default_str();
  s->add_option("--n", sim.n, "Number of rounds")->capture_default_str();
  s->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  auto* omega_opt = s->add_option("--omega-exp", omega_exp, "Abort threshold on the winning frequency");
  s->add_option("--test-prob", sim.test_prob, "Probability of a test round")->capture_default_str();
  s->add_option("--correlation", sim.correlation_file, "CSV with columns x,y,a,b,p (device = file)");
  s->add_option("--format", sim.format, "json or text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  add_out(s);

  SquashArgs squash;
  auto* q = app.add_subcommand("squash", "Search for squashing channels on Eve's register");
  q->add_option("--s-points", squash.s_points, "Points along S")->capture_default_str();
  q->add_option("--e-out", squash.e_out, "Output dimensions of the channel")->delimiter(',')->capture_default_str();
  q->add_option("--env", squash.env, "Stinespring environment dimensions")->delimiter(',')->capture_default_str();
  q->add_option("--restarts", squash.restarts, "Restarts per configuration")->capture_default_str();
  q->add_option("--max-evals", squash.max_evals, "Objective evaluations per restart")->capture_default_str();
  q->add_option("--seed", squash.seed, "Random seed")->capture_default_str();
  add_out(q);

  std::string manifest;
  auto* r = app.add_subcommand("replay", "Re-run a manifest written by a previous run");
  r->add_option("manifest", manifest, "Path to a *_manifest.json")->required();
  r->add_option("--out", out, "Output directory (default: the manifest's directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests succeed; every usage error exits with 2.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (b->parsed()) {
      std::tie(bounds.grid_s, bounds.grid_q) = parse_grid(grid);
      return cmd_bounds(bounds, resolve_out_dir(out));
    }
    if (p->parsed()) {
      const int status = cmd_peres(peres, resolve_out_dir(out));
      if (status != 0) std::cerr << "peres: one-way key rates are not all non-positive at the given tolerance\n";
      return status;
    }
    if (s->parsed()) {
      if (omega_opt->count() > 0) sim.omega_exp = omega_exp;
      return cmd_simulate(sim, resolve_out_dir(out));
    }
    if (q->parsed()) return cmd_squash(squash, resolve_out_dir(out));
    if (r->parsed()) return cmd_replay(manifest, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace diqkd::cli

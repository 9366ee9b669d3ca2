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

// Subcommands of the `diqkd` tool. Each writes its data files plus a
// `<subcommand>_manifest.json` into the output directory; replaying that
// manifest regenerates the same bytes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace diqkd::cli {

inline constexpr const char* kToolName = "diqkd";
inline constexpr const char* kToolVersion = "0.1.0";
/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "DIQKD_OUT_DIR";

struct BoundsArgs {
  std::size_t curve_points = 200;
  std::size_t grid_s = 100;
  std::size_t grid_q = 100;
};

struct PeresArgs {
  double q = 0.2;
  double tol = 1e-9;
  std::string format = "text";  // text | csv
};

struct SimulateArgs {
  std::string device = "attack";  // attack | depolarizing | classical | file
  double s = 2.0 * 1.4142135623730951;
  double q = 0.0;
  double nu = 0.0;
  std::uint64_t n = 100000;
  std::uint64_t seed = 0;
  /// Defaults to the device's CHSH winning probability minus three standard
  /// deviations of the estimate.
  std::optional<double> omega_exp;
  double test_prob = 0.5;
  std::string correlation_file;
  std::string format = "json";  // json | text
};

struct SquashArgs {
  std::size_t s_points = 10;
  std::vector<std::size_t> e_out{1, 2, 3, 4};
  std::vector<std::size_t> env{1, 2};
  std::size_t restarts = 16;
  std::size_t max_evals = 2000;
  std::uint64_t seed = 0;
};

struct RunManifest {
  std::string subcommand;
  nlohmann::ordered_json parameters;
  std::uint64_t seed = 0;
  std::string version = kToolVersion;
  std::vector<std::string> outputs;  // relative to the output directory

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

/// Output directory: explicit value, else $DIQKD_OUT_DIR, else ".".
std::filesystem::path resolve_out_dir(const std::string& explicit_dir);

/// Each returns the process exit status.
int cmd_bounds(const BoundsArgs& args, const std::filesystem::path& out_dir);
/// 0 iff the evidence report supports the no-key conclusion at args.tol.
int cmd_peres(const PeresArgs& args, const std::filesystem::path& out_dir);
int cmd_simulate(const SimulateArgs& args, const std::filesystem::path& out_dir);
int cmd_squash(const SquashArgs& args, const std::filesystem::path& out_dir);
/// Re-runs a manifest into `out_dir`, or the manifest's own directory when empty.
int cmd_replay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir = {});

/// Full command-line entry point.
int run(int argc, char** argv);

}  // namespace diqkd::cli

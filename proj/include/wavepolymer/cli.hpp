#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavepolymer/experiments.hpp"
#include "wavepolymer/spectrum.hpp"

namespace wavepolymer {

inline constexpr const char* kCodeVersion = "0.1.0";

struct RunConfig {
  DomainConfig domain;
  double spectrum_c = 1.0;
  double spectrum_alpha = 2.0;
  std::optional<double> beta;  // absent -> prior-only outputs
  int n_replicas = 64;
  int bins = 256;
  int threads = 1;
  double tilt_a = 0.5;
  // sweep block
  std::vector<double> sweep_J;
  double ess_floor = 32.0;
  int pcn_steps = 4096;
  double pcn_rho = 0.25;
  double envelope_eps = 0.25;
  double envelope_K = 4.0;

  std::string canonical;  // sorted-key JSON dump used for hashing
  std::string hash;       // FNV-1a 64, hex
};

struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string code_version;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

// Validates every cross-field constraint and rejects unknown keys; error
// messages name the offending key and constraint.
RunConfig parse_config(const std::string& path);

std::string fnv1a_hex(const std::string& data);

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides config seed
  std::optional<int> threads;         // CLI > env > config
  bool verbose = false;
};

// subcommand in {simulate, radius, gibbs, sweep, verify, girsanov-check}.
// Writes the declared outputs plus manifest.json into out_dir.
RunManifest run(const std::string& subcommand, const RunConfig& config,
                const std::string& out_dir, const RunOptions& opts = {});

}  // namespace wavepolymer

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace repgame {

// One verifiable number with its tolerance or statistical slack attached.
struct Claim {
  std::string name;
  double value = 0.0;
  double slack = 0.0;
  std::string slack_kind;  // "tolerance", "3-sigma", "truncation", ...
  bool has_expectation = false;
  double expected = 0.0;
  bool pass = true;
};

// Provenance stamp for emitted artifacts. The id is derived from inputs,
// flags, seed and version only, so identical runs emit identical artifacts;
// wall-clock time lives in the separate manifest file.
struct RunManifest {
  std::string command;
  std::string scenario_path;
  std::string scenario_hash;
  std::string params;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> outputs;
  double wall_clock_ms = 0.0;
  std::string id() const;
};

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t value);

std::string claims_to_json(const std::vector<Claim>& claims);
std::string manifest_to_json(const RunManifest& m);

}  // namespace repgame

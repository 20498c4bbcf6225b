#include "repgame/report.hpp"

#include "json.hpp"

namespace repgame {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string RunManifest::id() const {
  return hex64(fnv1a(command + "\n" + scenario_hash + "\n" + params + "\n" +
                     std::to_string(seed) + "\n" + version));
}

std::string claims_to_json(const std::vector<Claim>& claims) {
  json arr = json::array();
  for (const auto& c : claims) {
    json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j["slack"] = c.slack;
    j["slack_kind"] = c.slack_kind;
    if (c.has_expectation) {
      j["expected"] = c.expected;
      j["pass"] = c.pass;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["id"] = m.id();
  j["command"] = m.command;
  j["scenario"] = m.scenario_path;
  j["scenario_hash"] = m.scenario_hash;
  j["params"] = m.params;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["outputs"] = m.outputs;
  j["wall_clock_ms"] = m.wall_clock_ms;
  return j.dump(2);
}

}  // namespace repgame

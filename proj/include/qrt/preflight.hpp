#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qrt/config.hpp"

namespace qrt {

struct PreflightCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct PreflightReport {
  std::vector<PreflightCheck> checks;
  bool all_pass = false;
};

/// Fixture the environment is checked against. The RNG outputs were
/// recorded at repository creation; preflight asserts self-consistency,
/// not external truth.
struct PreflightExpectations {
  std::array<std::uint64_t, 8> rng_seed0_outputs;
  std::string hash_input;
  std::string hash_hex;
};

const PreflightExpectations& default_expectations();

/// Runs every check regardless of earlier failures: config schema, RNG
/// self-test, hash self-test, output-dir writability, version stamps.
PreflightReport preflight(const LabConfig& cfg,
                          const PreflightExpectations& exp = default_expectations());

nlohmann::ordered_json preflight_to_json(const PreflightReport& report);

}  // namespace qrt

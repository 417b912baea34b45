#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nctk/report.hpp"

namespace nctk {

struct SuiteConfig {
  std::uint64_t seed = 20240917;
  /// Replaces every tolerance when ≥ 0.
  double tolerance_override = -1.0;
  /// Random draws per randomized check.
  int kernel_draws = 100;
  int coherent_draws = 200;
  int blockframe_draws = 1000;
  int envrep_pairs = 50;
  /// Truncation used for θ = 0.01 in the oscillator sweep.
  int sweep_levels_small = 500;
};

/// blockframe, kernels, star, coherent, fock, envrep, dynamics (in that order).
const std::vector<std::string>& suite_names();

/// InvalidArgument for an unknown name.
VerificationReport run_suite(const std::string& name, const SuiteConfig& cfg);

}  // namespace nctk

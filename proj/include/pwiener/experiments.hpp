#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "pwiener/config.hpp"
#include "pwiener/io.hpp"
#include "pwiener/wiener.hpp"

namespace pwiener {

struct RunOptions {
  /// Overrides output_dir from the config when set.
  std::optional<std::filesystem::path> out_dir;
  /// Overrides the config seed when set.
  std::optional<std::uint64_t> seed;
};

/// rho, cap_obstacle, cap_full, delta, iters for every configured radius.
io::Json cmd_capacity(const ExperimentConfig& cfg, const RunOptions& opt);
/// Capacity profile on the geometric radii plus the Wiener tail diagnostic.
io::Json cmd_delta_profile(const ExperimentConfig& cfg, const RunOptions& opt);
/// Cascade over synthetic profiles, no PDE or capacity solves.
io::Json cmd_cascade(const ExperimentConfig& cfg, const RunOptions& opt);
/// Time-dependent solve with snapshots and energy history.
io::Json cmd_solve(const ExperimentConfig& cfg, const RunOptions& opt);
/// End-to-end check of the decay estimate. On failure the report is still
/// written, naming the stage, and the error is rethrown.
io::Json cmd_verify(const ExperimentConfig& cfg, const RunOptions& opt);

/// Synthetic profiles described by `profile.synthetic`, drawn with `seed`.
std::vector<CapacityProfile> synthetic_profiles(const ExperimentConfig& cfg, double c_bar, std::uint64_t seed);

/// Configured c_bar, or the one from choose_c_bar.
CBarChoice resolve_c_bar(const ExperimentConfig& cfg);

}  // namespace pwiener

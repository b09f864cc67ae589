#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pwiener/capacity.hpp"
#include "pwiener/geometry.hpp"
#include "pwiener/pde.hpp"

namespace pwiener {

inline constexpr int config_schema_version = 1;

struct ConstantsConfig {
  StructureConstants values;
  // Unset entries follow the default family once c_bar is known.
  bool gamma_star_auto = true;
  bool gamma_3_auto = true;
  bool gamma_auto = true;
};

struct SyntheticProfileConfig {
  /// Either explicit deltas, or a generator.
  std::vector<double> deltas;
  /// constant | geometric | noisy_constant | random_diverging
  std::string generator;
  int count = 0;
  double level = 1.0;
  double ratio = 0.5;
  double noise = 0.1;
  /// Number of profiles drawn from the generator.
  int profiles = 1;
};

struct ProfileConfig {
  std::optional<double> R_o;  // empty: realise from t_o
  double R_max = 0.5;
  int search_levels = 8;
  double epsilon = 0.5;
  int depth = 4;
  std::optional<double> c_bar;  // empty: smallest admissible dyadic value
  double mu_o = 1.0;
  int wiener_window = 4;
  std::optional<SyntheticProfileConfig> synthetic;
};

struct TimeGridConfig {
  /// uniform | intrinsic | graded
  std::string kind = "uniform";
  double t_start = 0.0;
  int steps = 100;
  double factor = 1.0;
  double omega = 1.0;
  double tau_min = 1e-3;
  double tau_max = 1e-2;
  double growth = 1.1;
};

struct DatumConfig {
  /// constant | linear | distance_ramp | barenblatt
  std::string kind = "distance_ramp";
  double value = 0.0;
  double c0 = 0.0;
  std::vector<double> c;
  double ct = 0.0;
  double width = 0.5;
  double C = 1.0;
  std::vector<double> center;
};

struct PdeConfig {
  Cube box;
  double h = 1.0 / 64.0;
  double T = 1.0;
  TimeGridConfig time;
  DatumConfig datum;
  SchemeConfig scheme;
  /// Time indices to dump; negative values count from the end.
  std::vector<int> snapshots;
  int lateral_samples = 33;
};

struct HarnackProbeConfig {
  std::vector<double> y;
  double s = 0.0;
  double rho = 0.0;
};

struct SpreadingProbeConfig {
  std::vector<double> y;
  double rho = 0.0;
  double t_bar = 0.0;
  double k = 0.0;
};

struct ProbesConfig {
  std::vector<double> radii;
  std::vector<HarnackProbeConfig> harnack;
  std::vector<SpreadingProbeConfig> spreading;
};

struct ExperimentConfig {
  int schema_version = config_schema_version;
  std::string name = "experiment";
  std::uint64_t seed = 0;
  std::optional<DomainSpec> domain;
  std::optional<Point> x_o;  // defaults to the domain anchor
  double t_o = 1.0;
  double p = 3.0;
  int N = 2;
  ConstantsConfig constants;
  CapacityConfig capacity;
  /// Radii for the capacity command.
  std::vector<double> capacity_radii;
  ProfileConfig profile;
  std::optional<PdeConfig> pde;
  ProbesConfig probes;
  std::string output_dir = "out";
  /// Verbatim source text, echoed into every artifact.
  std::string raw_text;

  const DomainSpec& require_domain() const;
  Point anchor_point() const;
  /// Structural parameters once c_bar is fixed.
  StructureParams structure(double c_bar) const;
};

/// Parse and validate; errors are ConfigError with "line L, column C" positions.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::string& path);

std::vector<double> make_times(const PdeConfig& pde, double p);
BoundaryDatum make_datum(const DatumConfig& d, const DomainSpec& domain, double p, int N);

}  // namespace pwiener

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pwiener/capacity.hpp"
#include "pwiener/geometry.hpp"
#include "pwiener/pde.hpp"
#include "pwiener/probes.hpp"
#include "pwiener/wiener.hpp"

namespace pwiener::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits, so the text reads back to the same double.
std::string format_double(double v);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// CSV with a header row. Optional leading comment lines start with "# ".
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void comment(std::string_view text);
  /// Cells already formatted; must match the column count.
  void row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string cell(double v);
std::string cell(long v);
std::string cell(int v);
std::string cell(bool v);

// Field snapshots. Binary layout, little-endian:
//   char[4] "PLFS", u32 version (1), u32 N, u32 n[N] nodes per axis,
//   f64 h, f64 center[N], u64 time index, f64 t, f64 u[n^N]
// with x1 varying fastest.
struct Snapshot {
  int dim = 2;
  int n = 0;
  double h = 0.0;
  Point center;
  std::uint64_t time_index = 0;
  double t = 0.0;
  std::vector<double> values;
};

Snapshot snapshot_of(const SpaceTimeField& field, int time_index);
std::string snapshot_binary(const Snapshot& s);
Snapshot parse_snapshot_binary(std::string_view bytes);
/// Comment header with the same metadata, then x1[,x2],u per node.
std::string snapshot_csv(const Snapshot& s);

Json to_json(const Point& p);
Json to_json(const StructureParams& s);
Json to_json(const SolverConfig& c);
Json to_json(const CapacityProfile& p);
Json to_json(const WienerDiagnostic& d);
Json to_json(const Subsequence& s);
Json to_json(const CascadeReport& r);
Json to_json(const HarnackProbeResult& r);
Json to_json(const SpreadingProbeResult& r);
Json to_json(const FitReport& f);
Json to_json(const RealizedScale& r);

/// rho, wiener_sum, envelope, cascade_level, power_law_branch
CsvTable envelope_csv(const CascadeReport& r);

}  // namespace pwiener::io

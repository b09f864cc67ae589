#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pwiener {

/// A point of R^N, N in {1, 2}.
class Point {
 public:
  Point() = default;
  explicit Point(double x1) : x_{x1, 0.0}, dim_(1) {}
  Point(double x1, double x2) : x_{x1, x2}, dim_(2) {}
  static Point from(const std::vector<double>& coords);

  int dim() const noexcept { return dim_; }
  double operator[](int axis) const noexcept { return x_[static_cast<std::size_t>(axis)]; }
  double& operator[](int axis) noexcept { return x_[static_cast<std::size_t>(axis)]; }
  std::vector<double> coords() const;

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::array<double, 2> x_{0.0, 0.0};
  int dim_ = 2;
};

double distance(const Point& a, const Point& b);
/// max_i |a_i - b_i|
double sup_distance(const Point& a, const Point& b);

/// Closed cube K_rho(center) = { x : |x - center|_inf <= half_edge }.
struct Cube {
  Point center;
  double half_edge = 1.0;

  Cube() = default;
  Cube(Point c, double r);

  int dim() const noexcept { return center.dim(); }
  /// Membership with an absolute slack `tol` on the sup-distance.
  bool contains(const Point& x, double tol = 0.0) const;
};

/// Node-centred uniform lattice with the same odd node count on every axis.
/// Node (i, j) sits at center + ((i - m) h, (j - m) h), m = (n - 1) / 2,
/// and has flat index j * n + i (x1 fastest).
struct NodeGrid {
  int dim = 2;
  int n = 3;
  double h = 1.0;
  Point center;

  /// Lattice covering `cube` with spacing h; h must divide the half-edge.
  static NodeGrid over(const Cube& cube, double h);

  int half_count() const noexcept { return (n - 1) / 2; }
  std::size_t size() const noexcept;
  Cube box() const;
  Point node(std::size_t index) const;
  double coord(int axis, int i) const noexcept;
  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
  }
  std::array<int, 2> multi_index(std::size_t index) const noexcept;
  bool on_face(std::size_t index) const noexcept;
};

/// Boolean value per node of a lattice over a cube.
struct IndicatorField {
  NodeGrid grid;
  std::vector<std::uint8_t> values;

  std::size_t count() const;
  bool any() const { return count() > 0; }
};

enum class DomainKind {
  full_space,
  half_space,
  exterior_cube,
  slit,
  power_cusp,
  cantor_obstacle,
  custom_mask,
};

std::string_view to_string(DomainKind kind);
DomainKind domain_kind_from_string(std::string_view name);

/// Open set E near a boundary point. The complement E^c is described
/// analytically so membership is exact.
///
/// Parameter lists, per kind (coordinates are absolute):
///   full_space       []
///   half_space       []                      E = { x1 < anchor1 }
///   exterior_cube    [c1, (c2,) a]           E^c = closed K_a(c)
///   slit             [length]                E^c = segment anchor + [0, length] e1
///   power_cusp       [q]                     E^c = { s >= 0, |y| <= s^q }, (s, y) = x - anchor
///   cantor_obstacle  [level, ratio, length]  E^c = anchor + length * C_level e1
///   custom_mask      [lo1, hi1, (lo2, hi2)]* E^c = union of closed boxes
class DomainSpec {
 public:
  static DomainSpec make(DomainKind kind, const std::vector<double>& params, const Point& anchor);

  static DomainSpec full_space(int dim);
  static DomainSpec half_space(const Point& anchor);
  static DomainSpec exterior_cube(const Cube& removed, const Point& anchor);
  static DomainSpec slit(const Point& anchor, double length);
  static DomainSpec power_cusp(const Point& anchor, double exponent);
  static DomainSpec cantor_obstacle(const Point& anchor, int level, double ratio, double length = 1.0);
  static DomainSpec custom_mask(const Point& anchor, const std::vector<Cube>& boxes);

  DomainKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return anchor_.dim(); }
  const Point& anchor() const noexcept { return anchor_; }
  const std::vector<double>& params() const noexcept { return params_; }

  /// True iff x lies in E.
  bool contains(const Point& x) const;
  /// Euclidean distance from x to E^c (zero on E^c).
  double distance_to_complement(const Point& x) const;
  /// E^c has zero N-measure near the anchor and is thickened when rasterized.
  bool lower_dimensional() const noexcept;
  /// x is not in E and points of E accumulate at x (probed along 8 rays).
  bool is_boundary_point(const Point& x) const;
  /// Throws InvalidArgument unless the anchor is a boundary point of E.
  void validate_anchor() const;

 private:
  DomainSpec(DomainKind kind, std::vector<double> params, Point anchor);
  void build();
  bool in_complement(const Point& x) const;

  DomainKind kind_ = DomainKind::full_space;
  std::vector<double> params_;
  Point anchor_;
  // Derived geometry of E^c: closed boxes (exterior_cube, custom_mask) or
  // x1-intervals on the anchor line (slit, cantor_obstacle).
  std::vector<std::pair<Point, Point>> boxes_;
  std::vector<std::pair<double, double>> segments_;
};

bool contains(const DomainSpec& domain, const Point& x);

/// Nodes of the lattice over `inner` marked true iff they belong to E^c,
/// or, for lower-dimensional E^c, lie within grid_h / 2 of it.
IndicatorField rasterize_obstacle(const DomainSpec& domain, const Cube& inner, double grid_h);

}  // namespace pwiener

#include "pwiener/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwiener/errors.hpp"

namespace pwiener {

namespace {

double box_distance(const std::pair<Point, Point>& box, const Point& x) {
  double s = 0.0;
  for (int a = 0; a < x.dim(); ++a) {
    double d = 0.0;
    if (x[a] < box.first[a]) d = box.first[a] - x[a];
    if (x[a] > box.second[a]) d = x[a] - box.second[a];
    s += d * d;
  }
  return std::sqrt(s);
}

bool box_contains(const std::pair<Point, Point>& box, const Point& x) {
  for (int a = 0; a < x.dim(); ++a) {
    if (x[a] < box.first[a] || x[a] > box.second[a]) return false;
  }
  return true;
}

double interval_distance(double lo, double hi, double v) {
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0.0;
}

std::vector<std::pair<double, double>> cantor_intervals(int level, double ratio) {
  std::vector<std::pair<double, double>> cur{{0.0, 1.0}};
  for (int l = 0; l < level; ++l) {
    std::vector<std::pair<double, double>> next;
    next.reserve(cur.size() * 2);
    for (const auto& [lo, hi] : cur) {
      const double len = (hi - lo) * ratio;
      next.emplace_back(lo, lo + len);
      next.emplace_back(hi - len, hi);
    }
    cur = std::move(next);
  }
  return cur;
}

// Distance from (s, y), y >= 0, to { s' >= 0, |y'| <= s'^q } for a point
// outside that set: minimise over the apex and the upper boundary curve.
double cusp_distance(double s, double y, double q) {
  auto f = [&](double t) {
    const double dx = s - t;
    const double dy = y - std::pow(t, q);
    return dx * dx + dy * dy;
  };
  const double reach = std::abs(s) + std::hypot(s, y);
  constexpr int samples = 256;
  double best_t = 0.0;
  double best = f(0.0);
  for (int k = 1; k <= samples; ++k) {
    const double t = reach * k / samples;
    const double v = f(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  double lo = std::max(0.0, best_t - reach / samples);
  double hi = best_t + reach / samples;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::sqrt(std::min(best, f(0.5 * (lo + hi))));
}

}  // namespace

Point Point::from(const std::vector<double>& coords) {
  if (coords.size() == 1) return Point(coords[0]);
  if (coords.size() == 2) return Point(coords[0], coords[1]);
  throw InvalidArgument("point must have 1 or 2 coordinates, got " + std::to_string(coords.size()));
}

std::vector<double> Point::coords() const {
  return std::vector<double>(x_.begin(), x_.begin() + dim_);
}

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double sup_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

Cube::Cube(Point c, double r) : center(c), half_edge(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("cube half-edge must be positive and finite");
}

bool Cube::contains(const Point& x, double tol) const {
  return sup_distance(center, x) <= half_edge + tol;
}

NodeGrid NodeGrid::over(const Cube& cube, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
  const double ratio = cube.half_edge / h;
  const double m = std::round(ratio);
  if (std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("grid spacing " + std::to_string(h) + " does not divide half-edge " +
                          std::to_string(cube.half_edge));
  }
  if (m < 1.0) throw InvalidArgument("degenerate grid: fewer than 3 nodes per axis");
  if (m > 1e6) throw InvalidArgument("grid too fine");
  NodeGrid g;
  g.dim = cube.dim();
  g.n = 2 * static_cast<int>(m) + 1;
  g.h = h;
  g.center = cube.center;
  return g;
}

std::size_t NodeGrid::size() const noexcept {
  const auto nn = static_cast<std::size_t>(n);
  return dim == 1 ? nn : nn * nn;
}

Cube NodeGrid::box() const { return Cube(center, half_count() * h); }

double NodeGrid::coord(int axis, int i) const noexcept {
  return center[axis] + (i - half_count()) * h;
}

std::array<int, 2> NodeGrid::multi_index(std::size_t index) const noexcept {
  const auto nn = static_cast<std::size_t>(n);
  return {static_cast<int>(index % nn), static_cast<int>(index / nn)};
}

Point NodeGrid::node(std::size_t index) const {
  const auto [i, j] = multi_index(index);
  if (dim == 1) return Point(coord(0, i));
  return Point(coord(0, i), coord(1, j));
}

bool NodeGrid::on_face(std::size_t index) const noexcept {
  const auto [i, j] = multi_index(index);
  if (i == 0 || i == n - 1) return true;
  return dim == 2 && (j == 0 || j == n - 1);
}

std::size_t IndicatorField::count() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::uint8_t{1}));
}

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::full_space: return "full_space";
    case DomainKind::half_space: return "half_space";
    case DomainKind::exterior_cube: return "exterior_cube";
    case DomainKind::slit: return "slit";
    case DomainKind::power_cusp: return "power_cusp";
    case DomainKind::cantor_obstacle: return "cantor_obstacle";
    case DomainKind::custom_mask: return "custom_mask";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(std::string_view name) {
  for (auto k : {DomainKind::full_space, DomainKind::half_space, DomainKind::exterior_cube, DomainKind::slit,
                 DomainKind::power_cusp, DomainKind::cantor_obstacle, DomainKind::custom_mask}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown domain kind '" + std::string(name) + "'");
}

DomainSpec::DomainSpec(DomainKind kind, std::vector<double> params, Point anchor)
    : kind_(kind), params_(std::move(params)), anchor_(anchor) {
  build();
}

void DomainSpec::build() {
  const int n = dim();
  if (n != 1 && n != 2) throw InvalidArgument("domain dimension must be 1 or 2");
  for (int a = 0; a < n; ++a) {
    if (!std::isfinite(anchor_[a])) throw InvalidArgument("anchor must be finite");
  }
  for (double v : params_) {
    if (!std::isfinite(v)) throw InvalidArgument("domain parameters must be finite");
  }
  auto expect = [&](std::size_t count) {
    if (params_.size() != count) {
      throw InvalidArgument(std::string(to_string(kind_)) + " expects " + std::to_string(count) +
                            " parameters, got " + std::to_string(params_.size()));
    }
  };
  switch (kind_) {
    case DomainKind::full_space:
    case DomainKind::half_space:
      expect(0);
      break;
    case DomainKind::exterior_cube: {
      expect(static_cast<std::size_t>(n) + 1);
      const double a = params_.back();
      if (!(a > 0.0)) throw InvalidArgument("exterior_cube half-edge must be positive");
      Point lo = anchor_, hi = anchor_;
      for (int i = 0; i < n; ++i) {
        lo[i] = params_[static_cast<std::size_t>(i)] - a;
        hi[i] = params_[static_cast<std::size_t>(i)] + a;
      }
      boxes_.emplace_back(lo, hi);
      break;
    }
    case DomainKind::slit: {
      expect(1);
      if (!(params_[0] > 0.0)) throw InvalidArgument("slit length must be positive");
      segments_.emplace_back(anchor_[0], anchor_[0] + params_[0]);
      break;
    }
    case DomainKind::power_cusp:
      expect(1);
      if (!(params_[0] >= 1.0)) throw InvalidArgument("power_cusp exponent must be >= 1");
      break;
    case DomainKind::cantor_obstacle: {
      expect(3);
      const double level = params_[0];
      if (level < 0 || level > 20 || level != std::floor(level)) {
        throw InvalidArgument("cantor_obstacle level must be an integer in [0, 20]");
      }
      if (!(params_[1] > 0.0 && params_[1] < 0.5)) throw InvalidArgument("cantor_obstacle ratio must be in (0, 1/2)");
      if (!(params_[2] > 0.0)) throw InvalidArgument("cantor_obstacle length must be positive");
      for (const auto& [lo, hi] : cantor_intervals(static_cast<int>(level), params_[1])) {
        segments_.emplace_back(anchor_[0] + params_[2] * lo, anchor_[0] + params_[2] * hi);
      }
      break;
    }
    case DomainKind::custom_mask: {
      const auto per = static_cast<std::size_t>(2 * n);
      if (params_.empty() || params_.size() % per != 0) {
        throw InvalidArgument("custom_mask expects a nonempty list of boxes [lo1, hi1" +
                              std::string(n == 2 ? ", lo2, hi2]" : "]"));
      }
      for (std::size_t b = 0; b < params_.size(); b += per) {
        Point lo = anchor_, hi = anchor_;
        for (int i = 0; i < n; ++i) {
          lo[i] = params_[b + 2 * static_cast<std::size_t>(i)];
          hi[i] = params_[b + 2 * static_cast<std::size_t>(i) + 1];
          if (!(lo[i] <= hi[i])) throw InvalidArgument("custom_mask box has lo > hi");
        }
        boxes_.emplace_back(lo, hi);
      }
      break;
    }
  }
}

DomainSpec DomainSpec::make(DomainKind kind, const std::vector<double>& params, const Point& anchor) {
  return DomainSpec(kind, params, anchor);
}

DomainSpec DomainSpec::full_space(int dim) {
  return DomainSpec(DomainKind::full_space, {}, dim == 1 ? Point(0.0) : Point(0.0, 0.0));
}

DomainSpec DomainSpec::half_space(const Point& anchor) { return DomainSpec(DomainKind::half_space, {}, anchor); }

DomainSpec DomainSpec::exterior_cube(const Cube& removed, const Point& anchor) {
  std::vector<double> p = removed.center.coords();
  p.push_back(removed.half_edge);
  return DomainSpec(DomainKind::exterior_cube, std::move(p), anchor);
}

DomainSpec DomainSpec::slit(const Point& anchor, double length) {
  return DomainSpec(DomainKind::slit, {length}, anchor);
}

DomainSpec DomainSpec::power_cusp(const Point& anchor, double exponent) {
  return DomainSpec(DomainKind::power_cusp, {exponent}, anchor);
}

DomainSpec DomainSpec::cantor_obstacle(const Point& anchor, int level, double ratio, double length) {
  return DomainSpec(DomainKind::cantor_obstacle, {static_cast<double>(level), ratio, length}, anchor);
}

DomainSpec DomainSpec::custom_mask(const Point& anchor, const std::vector<Cube>& boxes) {
  std::vector<double> p;
  for (const auto& b : boxes) {
    for (int i = 0; i < b.dim(); ++i) {
      p.push_back(b.center[i] - b.half_edge);
      p.push_back(b.center[i] + b.half_edge);
    }
  }
  return DomainSpec(DomainKind::custom_mask, std::move(p), anchor);
}

bool DomainSpec::in_complement(const Point& x) const {
  switch (kind_) {
    case DomainKind::full_space:
      return false;
    case DomainKind::half_space:
      return x[0] >= anchor_[0];
    case DomainKind::exterior_cube:
    case DomainKind::custom_mask:
      return std::any_of(boxes_.begin(), boxes_.end(), [&](const auto& b) { return box_contains(b, x); });
    case DomainKind::slit:
    case DomainKind::cantor_obstacle:
      if (dim() == 2 && x[1] != anchor_[1]) return false;
      return std::any_of(segments_.begin(), segments_.end(),
                         [&](const auto& s) { return x[0] >= s.first && x[0] <= s.second; });
    case DomainKind::power_cusp: {
      const double s = x[0] - anchor_[0];
      if (s < 0.0) return false;
      if (dim() == 1) return true;
      return std::abs(x[1] - anchor_[1]) <= std::pow(s, params_[0]);
    }
  }
  return false;
}

bool DomainSpec::contains(const Point& x) const {
  if (x.dim() != dim()) throw InvalidArgument("point dimension does not match domain");
  return !in_complement(x);
}

double DomainSpec::distance_to_complement(const Point& x) const {
  if (x.dim() != dim()) throw InvalidArgument("point dimension does not match domain");
  if (in_complement(x)) return 0.0;
  switch (kind_) {
    case DomainKind::full_space:
      return std::numeric_limits<double>::infinity();
    case DomainKind::half_space:
      return anchor_[0] - x[0];
    case DomainKind::exterior_cube:
    case DomainKind::custom_mask: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& b : boxes_) d = std::min(d, box_distance(b, x));
      return d;
    }
    case DomainKind::slit:
    case DomainKind::cantor_obstacle: {
      const double dy = dim() == 2 ? x[1] - anchor_[1] : 0.0;
      double d = std::numeric_limits<double>::infinity();
      for (const auto& [lo, hi] : segments_) d = std::min(d, std::hypot(interval_distance(lo, hi, x[0]), dy));
      return d;
    }
    case DomainKind::power_cusp: {
      const double s = x[0] - anchor_[0];
      if (dim() == 1) return -s;
      return cusp_distance(s, std::abs(x[1] - anchor_[1]), params_[0]);
    }
  }
  return 0.0;
}

bool DomainSpec::lower_dimensional() const noexcept {
  return dim() == 2 && (kind_ == DomainKind::slit || kind_ == DomainKind::cantor_obstacle);
}

bool DomainSpec::is_boundary_point(const Point& x) const {
  if (contains(x)) return false;
  std::vector<Point> dirs;
  if (dim() == 1) {
    dirs = {Point(1.0), Point(-1.0)};
  } else {
    const double r = std::sqrt(0.5);
    dirs = {Point(1, 0), Point(-1, 0), Point(0, 1), Point(0, -1), Point(r, r), Point(-r, r), Point(r, -r), Point(-r, -r)};
  }
  for (int k = 2; k <= 9; ++k) {
    const double eps = std::pow(10.0, -k);
    bool found = false;
    for (const auto& d : dirs) {
      Point y = x;
      for (int a = 0; a < dim(); ++a) y[a] += eps * d[a];
      if (contains(y)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

void DomainSpec::validate_anchor() const {
  if (kind_ == DomainKind::full_space) {
    throw InvalidArgument("full_space has no boundary point; x_o must lie on the boundary of E");
  }
  if (contains(anchor_)) throw InvalidArgument("anchor lies inside E; it must be a boundary point");
  if (!is_boundary_point(anchor_)) throw InvalidArgument("anchor is not in the closure of E");
}

bool contains(const DomainSpec& domain, const Point& x) { return domain.contains(x); }

IndicatorField rasterize_obstacle(const DomainSpec& domain, const Cube& inner, double grid_h) {
  if (inner.dim() != domain.dim()) throw InvalidArgument("cube dimension does not match domain");
  IndicatorField f;
  f.grid = NodeGrid::over(inner, grid_h);
  f.values.assign(f.grid.size(), 0);
  const bool thin = domain.lower_dimensional();
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    const Point x = f.grid.node(k);
    bool mark = !domain.contains(x);
    if (!mark && thin) mark = domain.distance_to_complement(x) < 0.5 * grid_h;
    f.values[k] = mark ? 1 : 0;
  }
  return f;
}

}  // namespace pwiener

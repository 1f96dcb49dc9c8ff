#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "annulus/core.hpp"
#include "annulus/grid.hpp"

namespace annulus {

/// Nonnegative cell weights on a dyadic grid, the discrete stand-in for a
/// fractal measure nu. Immutable after construction.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  DiscreteMeasure(GridSpec spec, std::vector<std::int64_t> cells, std::vector<double> weights)
      : spec_(spec), cells_(std::move(cells)), weights_(std::move(weights)) {
    if (cells_.size() != weights_.size()) throw std::invalid_argument("cells/weights mismatch");
    for (double w : weights_)
      if (w < 0.0) throw std::invalid_argument("weights must be >= 0");
    total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    centers_.reserve(cells_.size());
    for (auto c : cells_) {
      auto [ix, iy] = spec_.cell_coords(c);
      centers_.push_back(spec_.cell_center(ix, iy));
    }
  }

  static DiscreteMeasure from_points(const GridSpec& spec, const std::vector<Vec2>& points,
                                     double mass_per_cell) {
    std::vector<std::int64_t> cells;
    cells.reserve(points.size());
    for (Vec2 p : points) {
      auto [ix, iy] = spec.locate(p);
      if (!spec.in_range(ix, iy)) throw std::invalid_argument("point outside grid extent");
      cells.push_back(spec.cell_index(ix, iy));
    }
    return DiscreteMeasure(spec, std::move(cells),
                           std::vector<double>(points.size(), mass_per_cell));
  }

  /// Uniform weights on the cells of a rasterized shape, total mass given.
  static DiscreteMeasure uniform_on_spans(const GridSpec& spec,
                                          const std::vector<CellSpan>& spans, double total_mass) {
    std::vector<std::int64_t> cells;
    for (const auto& s : spans)
      for (int c = s.c0; c < s.c1; ++c) cells.push_back(spec.cell_index(c, s.iy));
    if (cells.empty()) throw std::invalid_argument("empty support");
    double w = total_mass / static_cast<double>(cells.size());
    std::vector<double> weights(cells.size(), w);
    return DiscreteMeasure(spec, std::move(cells), std::move(weights));
  }

  const GridSpec& spec() const { return spec_; }
  const std::vector<Vec2>& support_centers() const { return centers_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::int64_t>& cells() const { return cells_; }
  double total_mass() const { return total_; }
  std::size_t support_size() const { return cells_.size(); }
  bool trivial() const { return total_ <= 0.0; }

 private:
  GridSpec spec_;
  std::vector<std::int64_t> cells_;
  std::vector<double> weights_;
  std::vector<Vec2> centers_;
  double total_ = 0.0;
};

namespace detail {

/// Shared kernel for the ball-sup constants: for every support center x,
/// accumulates per-dyadic-radius totals of `quantity` over points within
/// distance rho, and returns sup quantity(B(x,rho)) / scale(rho).
/// Radii are {delta, 2*delta, ..., 1} (closed balls, centers at data points).
template <typename Scale>
double ball_sup(const std::vector<Vec2>& centers, const std::vector<double>& quantity,
                double delta, Scale scale) {
  int levels = std::max(1, dyadic_exponent(delta));
  if (dyadic_exponent(delta) < 0) {
    // non-dyadic delta: still sweep ~log2(1/delta) doubling radii
    levels = std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / delta))));
  }
  std::vector<double> bucket(levels + 1);
  double best = 0.0;
  const std::size_t n = centers.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(bucket.begin(), bucket.end(), 0.0);
    const Vec2 xi = centers[i];
    for (std::size_t j = 0; j < n; ++j) {
      double d2 = dist2(xi, centers[j]);
      // smallest level l with dist <= delta * 2^l
      double ratio2 = d2 / (delta * delta);
      int l = 0;
      while (l < levels && (1ull << (2 * l)) < ratio2) ++l;
      if (ratio2 > std::ldexp(1.0, 2 * levels)) continue;  // beyond radius 1
      bucket[l] += quantity[j];
    }
    double acc = 0.0;
    for (int l = 0; l <= levels; ++l) {
      acc += bucket[l];
      double rho = std::min(delta * std::ldexp(1.0, l), 1.0);
      double value = acc / scale(rho);
      best = std::max(best, value);
    }
  }
  return best;
}

}  // namespace detail

/// Frostman constant <mu>_alpha ~ sup mu(B(x,rho)) / rho^alpha, with x over
/// support centers and rho over dyadic radii {delta,...,1}. The restriction
/// to tested centers/radii under-reports the true sup by at most 2^(alpha+1).
inline double frostman_constant(const DiscreteMeasure& mu, double alpha) {
  if (mu.trivial()) throw std::invalid_argument("empty measure");
  if (!(alpha > 0.0) || alpha > 2.0) throw std::invalid_argument("invalid alpha");
  return detail::ball_sup(mu.support_centers(), mu.weights(), mu.spec().delta,
                          [alpha](double rho) { return std::pow(rho, alpha); });
}

/// Katz-Tao constant sup #(X cap B(x,r)) / (r/delta)^alpha over x in X and
/// dyadic r in [delta, 1]; same bounded-approximation guarantee as
/// frostman_constant.
inline double katz_tao_constant(const std::vector<Vec2>& points, double delta, double alpha) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  if (!(alpha > 0.0) || alpha > 2.0) throw std::invalid_argument("invalid alpha");
  std::vector<double> ones(points.size(), 1.0);
  return detail::ball_sup(points, ones, delta,
                          [alpha, delta](double rho) { return std::pow(rho / delta, alpha); });
}

/// Constant-weight measure on the delta-cells centered at X (the nu of the
/// discretization step; total mass #X * mass_per_cell).
inline DiscreteMeasure measure_from_katz_tao(const std::vector<Vec2>& points, double delta,
                                             double mass_per_cell) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  int k = dyadic_exponent(delta);
  if (k < 0) throw std::invalid_argument("delta must be 2^-k");
  // bounding box snapped to the delta lattice
  double xmin = points[0].x, xmax = points[0].x, ymin = points[0].y, ymax = points[0].y;
  for (Vec2 p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  Vec2 origin{std::floor(xmin / delta - 1.0) * delta, std::floor(ymin / delta - 1.0) * delta};
  int nx = static_cast<int>(std::ceil((xmax - origin.x) / delta)) + 2;
  int ny = static_cast<int>(std::ceil((ymax - origin.y) / delta)) + 2;
  GridSpec spec = GridSpec::make(k, origin, nx, ny);
  return DiscreteMeasure::from_points(spec, points, mass_per_cell);
}

// --- line-oriented text serialization ---------------------------------------
// Header `delta=<2^-k> alpha=<float>`, then one `x y [weight]` line per entry,
// >= 12 significant digits.

inline std::string format_sig12(double v) {
  std::ostringstream os;
  os.precision(14);
  os << v;
  return os.str();
}

inline void save_points(std::ostream& os, const std::vector<Vec2>& points, double delta,
                        double alpha) {
  os << "delta=" << format_dyadic(delta) << " alpha=" << format_sig12(alpha) << "\n";
  for (Vec2 p : points) os << format_sig12(p.x) << " " << format_sig12(p.y) << "\n";
}

inline void save_measure(std::ostream& os, const DiscreteMeasure& mu, double alpha) {
  os << "delta=" << format_dyadic(mu.spec().delta) << " alpha=" << format_sig12(alpha) << "\n";
  for (std::size_t i = 0; i < mu.support_size(); ++i) {
    Vec2 p = mu.support_centers()[i];
    os << format_sig12(p.x) << " " << format_sig12(p.y) << " " << format_sig12(mu.weights()[i])
       << "\n";
  }
}

struct PointFile {
  double delta = 0.0;
  double alpha = 0.0;
  std::vector<Vec2> points;
  std::vector<double> weights;  // empty if the file had no weight column
};

inline PointFile load_points(std::istream& is) {
  PointFile out;
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("empty point file");
  auto dpos = header.find("delta=");
  auto apos = header.find("alpha=");
  if (dpos == std::string::npos || apos == std::string::npos)
    throw std::runtime_error("bad point file header");
  out.delta = parse_dyadic(header.substr(dpos + 6, header.find(' ', dpos) - dpos - 6));
  out.alpha = std::stod(header.substr(apos + 6));
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vec2 p;
    double w;
    ls >> p.x >> p.y;
    if (!ls) throw std::runtime_error("bad point line: " + line);
    if (ls >> w) out.weights.push_back(w);
    out.points.push_back(p);
  }
  if (!out.weights.empty() && out.weights.size() != out.points.size())
    throw std::runtime_error("inconsistent weight column");
  return out;
}

}  // namespace annulus

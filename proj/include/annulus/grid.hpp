#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "annulus/core.hpp"

namespace annulus {

/// Dyadic lattice on a planar box. Cell side is exactly 2^-k.
struct GridSpec {
  double delta = 0.0;  // cell side, 2^-k
  int k = 0;
  Vec2 origin{};  // lower-left corner
  int nx = 0;
  int ny = 0;

  static GridSpec make(int k, Vec2 origin, int nx, int ny) {
    if (k < 1) throw std::invalid_argument("grid scale must be 2^-k with k >= 1");
    GridSpec s;
    s.k = k;
    s.delta = std::ldexp(1.0, -k);
    s.origin = origin;
    s.nx = nx;
    s.ny = ny;
    return s;
  }

  /// Default box [-3,3]^2: smallest dyadic-friendly box containing every
  /// annulus S_delta(x,r) with x in B(0,1/4), r in [1,2].
  static GridSpec standard(int k) {
    int n = 6 << k;
    return make(k, Vec2{-3.0, -3.0}, n, n);
  }

  Vec2 cell_center(int ix, int iy) const {
    return {origin.x + (ix + 0.5) * delta, origin.y + (iy + 0.5) * delta};
  }
  double cell_area() const { return delta * delta; }
  std::int64_t cell_count() const { return static_cast<std::int64_t>(nx) * ny; }
  std::int64_t cell_index(int ix, int iy) const { return static_cast<std::int64_t>(iy) * nx + ix; }
  std::pair<int, int> cell_coords(std::int64_t index) const {
    return {static_cast<int>(index % nx), static_cast<int>(index / nx)};
  }
  bool in_range(int ix, int iy) const { return ix >= 0 && ix < nx && iy >= 0 && iy < ny; }

  /// Cell containing p (p on a cell edge goes to the upper cell).
  std::pair<int, int> locate(Vec2 p) const {
    return {static_cast<int>(std::floor((p.x - origin.x) / delta)),
            static_cast<int>(std::floor((p.y - origin.y) / delta))};
  }

  bool same_lattice(const GridSpec& o) const {
    return k == o.k && origin.x == o.origin.x && origin.y == o.origin.y && nx == o.nx && ny == o.ny;
  }
};

/// Half-open column span [c0, c1) on row iy.
struct CellSpan {
  int iy = 0;
  int c0 = 0;
  int c1 = 0;
  int length() const { return c1 - c0; }
};

/// Appends to `out` the cells of `spec` whose centers y satisfy
/// (r - t)^2 <= |y - x|^2 < (r + t)^2 (half-open outer boundary so that
/// overlapping radius windows stay disjoint). Rows are scanned once; each row
/// contributes at most two spans.
inline void annulus_spans(Vec2 center, double r, double t, const GridSpec& spec,
                          std::vector<CellSpan>& out) {
  const double outer = r + t;
  const double inner = std::max(r - t, 0.0);
  const double outer2 = outer * outer;
  const double inner2 = inner * inner;
  const double d = spec.delta;

  int iy_lo = std::max(0, static_cast<int>(std::floor((center.y - outer - spec.origin.y) / d - 0.5)));
  int iy_hi = std::min(spec.ny - 1,
                       static_cast<int>(std::ceil((center.y + outer - spec.origin.y) / d - 0.5)));

  auto in_ring = [&](double dx2, double dy2) {
    double q = dx2 + dy2;
    return q >= inner2 && q < outer2;
  };

  for (int iy = iy_lo; iy <= iy_hi; ++iy) {
    double cy = spec.origin.y + (iy + 0.5) * d;
    double dy = cy - center.y;
    double dy2 = dy * dy;
    if (dy2 >= outer2) continue;
    double half_out = std::sqrt(outer2 - dy2);
    double half_in = inner2 > dy2 ? std::sqrt(inner2 - dy2) : -1.0;

    // Candidate column bounds from the analytic half-widths, then nudged so
    // the dist^2 predicate decides every boundary cell.
    auto emit = [&](double xlo, double xhi) {
      int c0 = static_cast<int>(std::floor((xlo - spec.origin.x) / d - 0.5));
      int c1 = static_cast<int>(std::ceil((xhi - spec.origin.x) / d + 0.5));
      c0 = std::max(c0 - 1, 0);
      c1 = std::min(c1 + 1, spec.nx);
      // shrink to the exact predicate
      while (c0 < c1) {
        double dx = spec.origin.x + (c0 + 0.5) * d - center.x;
        if (in_ring(dx * dx, dy2)) break;
        ++c0;
      }
      while (c1 > c0) {
        double dx = spec.origin.x + (c1 - 0.5) * d - center.x;
        if (in_ring(dx * dx, dy2)) break;
        --c1;
      }
      if (c0 < c1) out.push_back({iy, c0, c1});
    };

    if (half_in < 0.0) {
      emit(center.x - half_out, center.x + half_out);
    } else {
      emit(center.x - half_out, center.x - half_in);
      emit(center.x + half_in, center.x + half_out);
    }
  }
}

inline std::vector<CellSpan> annulus_spans(Vec2 center, double r, double t, const GridSpec& spec) {
  std::vector<CellSpan> out;
  annulus_spans(center, r, t, spec, out);
  return out;
}

/// Nonnegative density sampled on grid cells, stored as per-row runs of
/// constant value. All the f's in this lab are unions of a few geometric
/// primitives, so runs stay short while grids can be fine.
class GridFunction {
 public:
  struct Run {
    int c0;
    int c1;        // half-open
    double value;  // >= 0
    double cum;    // integral (in cells) of the row strictly before c0
  };

  GridFunction() = default;

  const GridSpec& spec() const { return spec_; }

  double value_at(int ix, int iy) const {
    if (!spec_.in_range(ix, iy)) return 0.0;
    const auto& row = rows_[iy];
    auto it = std::upper_bound(row.begin(), row.end(), ix,
                               [](int v, const Run& r) { return v < r.c0; });
    if (it == row.begin()) return 0.0;
    --it;
    return ix < it->c1 ? it->value : 0.0;
  }

  /// Sum of value*count over columns [c0, c1) of row iy.
  double span_sum(int iy, int c0, int c1) const {
    if (iy < 0 || iy >= spec_.ny || c0 >= c1) return 0.0;
    return row_cum_at(iy, c1) - row_cum_at(iy, c0);
  }

  /// Integral of the density (value * cell area summed over all cells).
  double integral() const { return total_cells_weighted_ * spec_.cell_area(); }

  /// L^p norm with counting-measure-on-cells times cell area; p = inf gives sup.
  double lp_norm(double p) const {
    if (p < 1.0) throw std::invalid_argument("invalid exponent");
    if (is_inf(p)) return max_value_;
    double acc = 0.0;
    for (const auto& row : rows_)
      for (const auto& run : row) acc += std::pow(run.value, p) * (run.c1 - run.c0);
    return std::pow(acc * spec_.cell_area(), 1.0 / p);
  }

  double max_value() const { return max_value_; }
  int row_begin() const { return row_lo_; }
  int row_end() const { return row_hi_; }
  const std::vector<Run>& row(int iy) const { return rows_[iy]; }
  bool empty() const { return total_cells_weighted_ == 0.0; }

  class Builder;

 private:
  double row_cum_at(int iy, int c) const {
    const auto& row = rows_[iy];
    auto it = std::upper_bound(row.begin(), row.end(), c,
                               [](int v, const Run& r) { return v < r.c0; });
    if (it == row.begin()) return 0.0;
    --it;
    return it->cum + it->value * (std::min(c, it->c1) - it->c0);
  }

  GridSpec spec_;
  std::vector<std::vector<Run>> rows_;
  double total_cells_weighted_ = 0.0;
  double max_value_ = 0.0;
  int row_lo_ = 0;
  int row_hi_ = 0;

  friend class Builder;
};

/// Accumulates weighted spans, then compacts them into a GridFunction.
/// Overlaps combine by max (indicator-union semantics) or by sum.
class GridFunction::Builder {
 public:
  enum class Combine { kMax, kSum };

  explicit Builder(GridSpec spec, Combine combine = Combine::kMax)
      : spec_(spec), combine_(combine), pending_(spec.ny) {}

  void add_span(int iy, int c0, int c1, double value) {
    if (value < 0.0) throw std::invalid_argument("grid function values must be >= 0");
    if (iy < 0 || iy >= spec_.ny) return;
    c0 = std::max(c0, 0);
    c1 = std::min(c1, spec_.nx);
    if (c0 < c1 && value > 0.0) pending_[iy].push_back({c0, c1, value});
  }

  void add_spans(std::span<const CellSpan> spans, double value) {
    for (const auto& s : spans) add_span(s.iy, s.c0, s.c1, value);
  }

  void add_annulus(Vec2 center, double r, double t, double value) {
    scratch_.clear();
    annulus_spans(center, r, t, spec_, scratch_);
    add_spans(scratch_, value);
  }

  /// Axis-aligned box [x0,x1) x [y0,y1): cells whose centers fall inside.
  void add_rect(Vec2 lo, Vec2 hi, double value) {
    auto [ix0, iy0] = spec_.locate({lo.x, lo.y});
    auto [ix1, iy1] = spec_.locate({hi.x, hi.y});
    for (int iy = std::max(iy0, 0); iy <= std::min(iy1, spec_.ny - 1); ++iy) {
      double cy = spec_.origin.y + (iy + 0.5) * spec_.delta;
      if (cy < lo.y || cy >= hi.y) continue;
      int c0 = ix0, c1 = ix1 + 1;
      while (c0 < c1 && spec_.origin.x + (c0 + 0.5) * spec_.delta < lo.x) ++c0;
      while (c1 > c0 && spec_.origin.x + (c1 - 0.5) * spec_.delta >= hi.x) --c1;
      add_span(iy, c0, c1, value);
    }
  }

  void add_disk(Vec2 center, double radius, double value) {
    add_annulus(center, 0.0, radius, value);
  }

  void add_constant(double value) {
    for (int iy = 0; iy < spec_.ny; ++iy) add_span(iy, 0, spec_.nx, value);
  }

  GridFunction build() && {
    GridFunction f;
    f.spec_ = spec_;
    f.rows_.resize(spec_.ny);
    f.row_lo_ = spec_.ny;
    f.row_hi_ = 0;
    for (int iy = 0; iy < spec_.ny; ++iy) {
      auto& pend = pending_[iy];
      if (pend.empty()) continue;
      // sweep the row boundaries
      std::vector<int> cuts;
      cuts.reserve(pend.size() * 2);
      for (auto& s : pend) {
        cuts.push_back(s.c0);
        cuts.push_back(s.c1);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      std::sort(pend.begin(), pend.end(), [](const Seg& a, const Seg& b) { return a.c0 < b.c0; });

      auto& row = f.rows_[iy];
      std::size_t next = 0;
      double running_sum = 0.0;
      auto expiry_less = [](const std::pair<int, double>& a, const std::pair<int, double>& b) {
        return a.first > b.first;  // min-heap on c1
      };
      std::vector<std::pair<int, double>> expiry;              // (c1, value), kSum
      std::vector<std::pair<double, int>> maxheap;             // (value, c1), kMax
      double cum = 0.0;
      for (std::size_t ci = 0; ci + 1 < cuts.size(); ++ci) {
        int a = cuts[ci], b = cuts[ci + 1];
        while (next < pend.size() && pend[next].c0 <= a) {
          const Seg& s = pend[next++];
          if (combine_ == Combine::kSum) {
            running_sum += s.value;
            expiry.emplace_back(s.c1, s.value);
            std::push_heap(expiry.begin(), expiry.end(), expiry_less);
          } else {
            maxheap.emplace_back(s.value, s.c1);
            std::push_heap(maxheap.begin(), maxheap.end());
          }
        }
        double v = 0.0;
        if (combine_ == Combine::kSum) {
          while (!expiry.empty() && expiry.front().first <= a) {
            running_sum -= expiry.front().second;
            std::pop_heap(expiry.begin(), expiry.end(), expiry_less);
            expiry.pop_back();
          }
          v = std::max(running_sum, 0.0);
        } else {
          while (!maxheap.empty() && maxheap.front().second <= a) {
            std::pop_heap(maxheap.begin(), maxheap.end());
            maxheap.pop_back();
          }
          if (!maxheap.empty()) v = maxheap.front().first;
        }
        if (v > 0.0) {
          if (!row.empty() && row.back().c1 == a && row.back().value == v) {
            row.back().c1 = b;
          } else {
            row.push_back({a, b, v, cum});
          }
          cum += v * (b - a);
          f.max_value_ = std::max(f.max_value_, v);
        }
      }
      f.total_cells_weighted_ += cum;
      if (!row.empty()) {
        f.row_lo_ = std::min(f.row_lo_, iy);
        f.row_hi_ = std::max(f.row_hi_, iy + 1);
      }
    }
    if (f.row_lo_ > f.row_hi_) f.row_lo_ = f.row_hi_ = 0;
    return f;
  }

 private:
  struct Seg {
    int c0;
    int c1;
    double value;
  };

  GridSpec spec_;
  Combine combine_;
  std::vector<std::vector<Seg>> pending_;
  std::vector<CellSpan> scratch_;
};

/// Dense multiplicity grid for the dual counting functional. Accumulation is
/// by per-row difference arrays so each annulus costs O(rows), not O(cells).
class MultiplicityGrid {
 public:
  explicit MultiplicityGrid(GridSpec spec)
      : spec_(spec), diff_(static_cast<std::size_t>(spec.ny) * (spec.nx + 1), 0.0) {}

  const GridSpec& spec() const { return spec_; }

  void add_annulus(Vec2 center, double r, double t, double weight = 1.0) {
    scratch_.clear();
    annulus_spans(center, r, t, spec_, scratch_);
    for (const auto& s : scratch_) {
      diff_[static_cast<std::size_t>(s.iy) * (spec_.nx + 1) + s.c0] += weight;
      diff_[static_cast<std::size_t>(s.iy) * (spec_.nx + 1) + s.c1] -= weight;
    }
    finalized_ = false;
  }

  /// Row-major cell values after prefix summing.
  const std::vector<double>& values() {
    finalize();
    return cells_;
  }

  double lp_norm(double pprime) {
    finalize();
    if (pprime < 1.0) throw std::invalid_argument("invalid exponent");
    if (is_inf(pprime)) {
      double m = 0.0;
      for (double v : cells_) m = std::max(m, v);
      return m;
    }
    double acc = 0.0;
    for (double v : cells_)
      if (v > 0.0) acc += std::pow(v, pprime);
    return std::pow(acc * spec_.cell_area(), 1.0 / pprime);
  }

  /// <multiplicity, g> integrated over the plane.
  double pair_with(const GridFunction& g) {
    finalize();
    if (!g.spec().same_lattice(spec_)) throw std::invalid_argument("lattice mismatch");
    double acc = 0.0;
    for (int iy = g.row_begin(); iy < g.row_end(); ++iy)
      for (const auto& run : g.row(iy))
        for (int c = run.c0; c < run.c1; ++c)
          acc += run.value * cells_[static_cast<std::size_t>(iy) * spec_.nx + c];
    return acc * spec_.cell_area();
  }

 private:
  void finalize() {
    if (finalized_) return;
    cells_.assign(spec_.cell_count(), 0.0);
    for (int iy = 0; iy < spec_.ny; ++iy) {
      const double* d = diff_.data() + static_cast<std::size_t>(iy) * (spec_.nx + 1);
      double* out = cells_.data() + static_cast<std::size_t>(iy) * spec_.nx;
      double acc = 0.0;
      for (int ix = 0; ix < spec_.nx; ++ix) {
        acc += d[ix];
        out[ix] = acc;
      }
    }
    finalized_ = true;
  }

  GridSpec spec_;
  std::vector<double> diff_;
  std::vector<double> cells_;
  std::vector<CellSpan> scratch_;
  bool finalized_ = false;
};

}  // namespace annulus

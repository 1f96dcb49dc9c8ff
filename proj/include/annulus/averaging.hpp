#pragma once

#include <stdexcept>
#include <vector>

#include "annulus/circle.hpp"
#include "annulus/core.hpp"
#include "annulus/grid.hpp"

namespace annulus {

/// One evaluation of the discretized circular average.
struct AverageSample {
  Vec2 x{};
  double r = 0.0;
  double value = 0.0;
};

namespace detail {

inline void check_average_pre(const GridFunction& f, Vec2 x, double r, double delta) {
  if (delta < f.spec().delta)
    throw std::invalid_argument("evaluation scale must be at least the grid scale");
  if (!(r > 0.0) || !(delta > 0.0)) throw std::invalid_argument("need r > 0 and delta > 0");
  const GridSpec& spec = f.spec();
  double reach = r + delta;
  double gx1 = spec.origin.x + spec.nx * spec.delta;
  double gy1 = spec.origin.y + spec.ny * spec.delta;
  if (x.x - reach < spec.origin.x || x.y - reach < spec.origin.y || x.x + reach > gx1 ||
      x.y + reach > gy1)
    throw std::invalid_argument("annulus exceeds grid extent");
}

}  // namespace detail

/// A_delta f(x,r): mean of f over the rasterized annulus S_delta(x,r),
/// normalized by the analytic shell area (4*pi*r*delta for r >= delta)
/// rather than the rasterized cell count, so constants stay scale-stable.
inline double discretized_average(const GridFunction& f, Vec2 x, double r, double delta) {
  detail::check_average_pre(f, x, r, delta);
  const GridSpec& spec = f.spec();
  const double outer = r + delta;
  const double inner = std::max(r - delta, 0.0);
  const double outer2 = outer * outer, inner2 = inner * inner;

  int iy_lo = std::max(f.row_begin(),
                       static_cast<int>(std::floor((x.y - outer - spec.origin.y) / spec.delta)));
  int iy_hi = std::min(f.row_end(),
                       static_cast<int>(std::ceil((x.y + outer - spec.origin.y) / spec.delta)));

  double mass = 0.0;  // sum of f over annulus cells, in cell units
  for (int iy = iy_lo; iy < iy_hi; ++iy) {
    if (f.row(iy).empty()) continue;
    double dy = spec.origin.y + (iy + 0.5) * spec.delta - x.y;
    double dy2 = dy * dy;
    if (dy2 >= outer2) continue;
    double half_out = std::sqrt(outer2 - dy2);
    double half_in = inner2 > dy2 ? std::sqrt(inner2 - dy2) : -1.0;

    auto span_mass = [&](double xlo, double xhi) {
      int c0 = static_cast<int>(std::floor((xlo - spec.origin.x) / spec.delta - 0.5)) - 1;
      int c1 = static_cast<int>(std::ceil((xhi - spec.origin.x) / spec.delta + 0.5)) + 1;
      c0 = std::max(c0, 0);
      c1 = std::min(c1, spec.nx);
      while (c0 < c1) {
        double dx = spec.origin.x + (c0 + 0.5) * spec.delta - x.x;
        double q = dx * dx + dy2;
        if (q >= inner2 && q < outer2) break;
        ++c0;
      }
      while (c1 > c0) {
        double dx = spec.origin.x + (c1 - 0.5) * spec.delta - x.x;
        double q = dx * dx + dy2;
        if (q >= inner2 && q < outer2) break;
        --c1;
      }
      if (c0 < c1) mass += f.span_sum(iy, c0, c1);
    };

    if (half_in < 0.0) {
      span_mass(x.x - half_out, x.x + half_out);
    } else {
      span_mass(x.x - half_out, x.x - half_in);
      span_mass(x.x + half_in, x.x + half_out);
    }
  }
  return mass * spec.cell_area() / Annulus::shell_area(r, delta);
}

/// Vectorized discretized_average over a monotone r grid. For the uniform
/// delta-spaced grid the whole profile is assembled from one distance
/// histogram of f around x (each cell lands in exactly two radius windows),
/// which matches the per-r evaluation cell for cell.
inline std::vector<double> average_profile(const GridFunction& f, Vec2 x,
                                           const std::vector<double>& r_grid, double delta) {
  if (r_grid.empty()) return {};
  for (std::size_t i = 1; i < r_grid.size(); ++i)
    if (!(r_grid[i] > r_grid[i - 1])) throw std::invalid_argument("r grid must be increasing");

  const std::size_t n = r_grid.size();
  bool uniform_delta = true;
  for (std::size_t i = 1; i < n && uniform_delta; ++i)
    if (std::abs((r_grid[i] - r_grid[i - 1]) - delta) > 1e-12 * delta) uniform_delta = false;

  if (!uniform_delta || n < 4) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = discretized_average(f, x, r_grid[i], delta);
    return out;
  }

  detail::check_average_pre(f, x, r_grid.front(), delta);
  detail::check_average_pre(f, x, r_grid.back(), delta);

  const GridSpec& spec = f.spec();
  const double r0 = r_grid.front();
  // bins G[i] collect f-mass of cells with floor((dist - r0)/delta) == i,
  // i in [-1, n); A(r_j) then reads G[j-1] + G[j].
  std::vector<double> bins(n + 1, 0.0);
  const double d_lo = std::max(r0 - delta, 0.0);
  const double d_hi = r_grid.back() + delta;
  const double d_lo2 = d_lo * d_lo, d_hi2 = d_hi * d_hi;

  auto bin_of = [&](double dist) {
    int b = static_cast<int>(std::floor((dist - r0) / delta));
    return b;
  };

  for (int iy = f.row_begin(); iy < f.row_end(); ++iy) {
    const auto& row = f.row(iy);
    if (row.empty()) continue;
    double dy = spec.origin.y + (iy + 0.5) * spec.delta - x.y;
    double dy2 = dy * dy;
    if (dy2 >= d_hi2) continue;
    for (const auto& run : row) {
      // split the run at the column nearest x, walk bin crossings on each
      // monotone half
      for (int pass = 0; pass < 2; ++pass) {
        int c0 = run.c0, c1 = run.c1;
        // pass 0: columns with center <= x.x (distance decreasing), pass 1: rest
        int split = static_cast<int>(std::floor((x.x - spec.origin.x) / spec.delta - 0.5)) + 1;
        if (pass == 0) {
          c1 = std::min(c1, split);
        } else {
          c0 = std::max(c0, split);
        }
        if (c0 >= c1) continue;
        // distances at run ends
        auto dist_at = [&](int c) {
          double dx = spec.origin.x + (c + 0.5) * spec.delta - x.x;
          return std::sqrt(dx * dx + dy2);
        };
        int lo = c0, hi = c1 - 1;  // inclusive columns
        // in pass 0 distance decreases with column; in pass 1 it increases
        int c = lo;
        while (c <= hi) {
          double dc = dist_at(c);
          if (dc >= d_hi) {
            // advance to the column where distance drops below d_hi
            // (monotone, so binary search)
            if (pass == 0) {
              int a = c, b = hi + 1;
              while (a < b) {
                int m = (a + b) / 2;
                if (dist_at(m) >= d_hi) a = m + 1; else b = m;
              }
              c = a;
              continue;
            } else {
              break;  // increasing: all further columns are out
            }
          }
          if (dc < d_lo) {
            if (pass == 0) {
              break;  // decreasing below range: the rest (towards x) is out...
            } else {
              int a = c, b = hi + 1;
              while (a < b) {
                int m = (a + b) / 2;
                if (dist_at(m) < d_lo) a = m + 1; else b = m;
              }
              c = a;
              continue;
            }
          }
          int bin = bin_of(dc);
          // find the last column (monotone run) still in this bin
          int a = c, b = hi;
          while (a < b) {
            int m = (a + b + 1) / 2;
            double dm = dist_at(m);
            if (dm >= d_lo && dm < d_hi && bin_of(dm) == bin) a = m; else b = m - 1;
          }
          bins[static_cast<std::size_t>(bin + 1)] += run.value * (a - c + 1);
          c = a + 1;
        }
      }
    }
  }

  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double mass = bins[j] + bins[j + 1];
    out[j] = mass * spec.cell_area() / Annulus::shell_area(r_grid[j], delta);
  }
  return out;
}

/// Uniform delta-spaced radius grid covering [lo, hi].
inline std::vector<double> radius_grid(double lo, double hi, double delta) {
  std::vector<double> r;
  for (double v = lo; v <= hi + 1e-12 * delta; v += delta) r.push_back(v);
  return r;
}

}  // namespace annulus

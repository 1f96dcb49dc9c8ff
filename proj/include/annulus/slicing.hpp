#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "annulus/core.hpp"
#include "annulus/grid.hpp"
#include "annulus/measure.hpp"

namespace annulus {

/// delta-separated point set with its nominal dimension and cached
/// non-concentration constant.
struct KatzTaoSet {
  std::vector<Vec2> points;
  double delta = 0.0;
  double alpha = 0.0;
  double kt_constant = 0.0;

  static KatzTaoSet wrap(std::vector<Vec2> pts, double delta, double alpha) {
    KatzTaoSet s;
    s.points = std::move(pts);
    s.delta = delta;
    s.alpha = alpha;
    s.kt_constant = katz_tao_constant(s.points, delta, alpha);
    return s;
  }
};

namespace detail {

inline void cantor_level(std::vector<Vec2>& cells, double parent_side, int split, int keep,
                         Rng& rng) {
  const int total = split * split;
  const double child = parent_side / split;
  std::vector<Vec2> next;
  next.reserve(cells.size() * keep);
  std::vector<int> choice(total);
  for (Vec2 origin : cells) {
    for (int i = 0; i < total; ++i) choice[i] = i;
    // partial Fisher-Yates: pick `keep` distinct children
    for (int i = 0; i < keep; ++i) {
      int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(total - i)));
      std::swap(choice[i], choice[j]);
      int cx = choice[i] % split, cy = choice[i] / split;
      next.push_back({origin.x + cx * child, origin.y + cy * child});
    }
  }
  cells.swap(next);
}

}  // namespace detail

/// Base-4 self-similar set realizing a Katz-Tao (delta, alpha, O(1))-set:
/// each level subdivides 4x and keeps round(4^alpha) children. For odd
/// log2(1/delta) a final 2x half-level keeping round(2^alpha) children lands
/// exactly on the requested scale. Points are cell centers inside
/// box_origin + [0, box_side)^2; box_side/delta must be a power of two.
inline KatzTaoSet generate_cantor_set(double delta, double alpha, std::uint64_t seed,
                                      Vec2 box_origin = {0.0, 0.0}, double box_side = 1.0,
                                      std::size_t max_points = 0) {
  if (!(alpha > 0.0) || alpha > 2.0) throw std::invalid_argument("invalid alpha");
  double levels_f = std::log2(box_side / delta);
  int j = static_cast<int>(std::lround(levels_f));
  if (std::abs(levels_f - j) > 1e-9 || j < 1)
    throw std::invalid_argument("delta must be a dyadic (2^-k, preferably 4^-k) fraction of the box");
  const int keep4 = std::max(1, static_cast<int>(std::lround(std::pow(4.0, alpha))));
  const int keep2 = std::max(1, static_cast<int>(std::lround(std::pow(2.0, alpha))));

  Rng rng(seed);
  std::vector<Vec2> cells{box_origin};
  double side = box_side;
  while (j >= 2) {
    detail::cantor_level(cells, side, 4, keep4, rng);
    side /= 4.0;
    j -= 2;
  }
  if (j == 1) {
    detail::cantor_level(cells, side, 2, keep2, rng);
    side /= 2.0;
  }
  for (Vec2& p : cells) p = {p.x + delta / 2.0, p.y + delta / 2.0};

  if (max_points > 0 && cells.size() > max_points) {
    // seeded subsample; Katz-Tao constants are inherited downwards
    for (std::size_t i = 0; i < max_points; ++i) {
      std::size_t k = i + static_cast<std::size_t>(rng.below(cells.size() - i));
      std::swap(cells[i], cells[k]);
    }
    cells.resize(max_points);
  }
  return KatzTaoSet::wrap(std::move(cells), delta, alpha);
}

/// 1-D base-4 Cantor subset of [0,1] with dimension alpha1 (keeps
/// round(4^alpha1) of 4 sub-intervals per level, round(2^alpha1) on an odd
/// final half-level). Returned values are interval midpoints.
inline std::vector<double> generate_cantor_line(double delta, double alpha1, std::uint64_t seed) {
  if (!(alpha1 > 0.0) || alpha1 > 1.0) throw std::invalid_argument("invalid 1-d dimension");
  double levels_f = std::log2(1.0 / delta);
  int j = static_cast<int>(std::lround(levels_f));
  if (std::abs(levels_f - j) > 1e-9 || j < 1) throw std::invalid_argument("delta must be 2^-k");
  const int keep4 = std::max(1, static_cast<int>(std::lround(std::pow(4.0, alpha1))));
  const int keep2 = std::max(1, static_cast<int>(std::lround(std::pow(2.0, alpha1))));

  Rng rng(seed);
  std::vector<double> cells{0.0};
  double side = 1.0;
  auto level = [&](int split, int keep) {
    double child = side / split;
    std::vector<double> next;
    next.reserve(cells.size() * keep);
    std::vector<int> choice(split);
    for (double origin : cells) {
      for (int i = 0; i < split; ++i) choice[i] = i;
      for (int i = 0; i < keep; ++i) {
        int t = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(split - i)));
        std::swap(choice[i], choice[t]);
        next.push_back(origin + choice[i] * child);
      }
    }
    cells.swap(next);
    side = child;
  };
  while (j >= 2) {
    level(4, std::min(keep4, 4));
    j -= 2;
  }
  if (j == 1) level(2, std::min(keep2, 2));
  for (double& c : cells) c += delta / 2.0;
  std::sort(cells.begin(), cells.end());
  return cells;
}

/// Dominant dyadic block of a positive list: the level 2^-j (relative to the
/// max) whose members [max*2^-j, max*2^-j+1) capture the largest share of the
/// sum. Values below max*delta^100 are treated as negligible and never win.
struct PigeonholeResult {
  double level = 0.0;  // 2^-j, relative to max
  std::vector<std::size_t> indices;
  double captured = 0.0;
  double total = 0.0;
};

inline PigeonholeResult dyadic_pigeonhole(const std::vector<double>& values, double delta = 0.5) {
  double max_v = 0.0;
  for (double v : values) {
    if (v < 0.0) throw std::invalid_argument("values must be >= 0");
    max_v = std::max(max_v, v);
  }
  if (max_v <= 0.0) throw std::invalid_argument("all-zero input");
  double cutoff = max_v * std::pow(delta, 100.0);  // may underflow to 0: keeps everything

  // block j holds values in (max*2^-(j+1), max*2^-j]; the max sits in block 0
  auto block_of = [max_v](double v) {
    int jj = std::max(0, static_cast<int>(std::floor(std::log2(max_v / v))));
    while (v <= max_v * std::ldexp(1.0, -jj - 1)) ++jj;
    while (jj > 0 && v > max_v * std::ldexp(1.0, -jj)) --jj;
    return jj;
  };

  std::map<int, double> block_sum;
  double total = 0.0;
  for (double v : values) {
    if (v <= cutoff || v <= 0.0) continue;
    block_sum[block_of(v)] += v;
    total += v;
  }
  int best_j = block_sum.begin()->first;
  double best = -1.0;
  for (auto [jj, s] : block_sum) {
    if (s > best) {
      best = s;
      best_j = jj;
    }
  }
  PigeonholeResult out;
  out.level = std::ldexp(1.0, -best_j);
  out.total = total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (v <= cutoff || v <= 0.0) continue;
    if (block_of(v) == best_j) {
      out.indices.push_back(i);
      out.captured += v;
    }
  }
  return out;
}

/// One tube of a slice decomposition.
struct Tube {
  int index = 0;       // floor(projection / delta)
  double offset = 0.0; // index * delta along the projection axis
  std::vector<std::size_t> members;
  double kt_constant_alpha_minus_1 = 0.0;
};

struct SliceDecomposition {
  Vec2 direction{};  // unit vector along the tubes; bucketing is on the normal
  std::vector<Tube> tubes;
  std::vector<std::size_t> refined_points;  // indices into the input set
  double retention = 0.0;                   // #refined / #X
  double epsilon0 = 0.0;  // fraction of sampled directions failing the KT budget
  double kt_budget = 0.0;
};

/// Angular sector of candidate tube directions (width fixed at 2*pi/100,
/// matching the 100-arc decomposition).
struct Sector {
  double center = kPi / 2.0;
  double width = 2.0 * kPi / 100.0;
};

/// Searches `candidates` directions in the sector for the one whose
/// delta-tube decomposition has the smallest maximal per-tube Katz-Tao
/// (delta, alpha-1) constant after a dyadic pigeonhole on tube counts.
inline SliceDecomposition slice_by_tubes(const KatzTaoSet& X, Sector sector, int candidates) {
  if (!(X.alpha > 1.0)) throw std::invalid_argument("slicing requires alpha>1");
  if (candidates < 10) throw std::invalid_argument("need at least 10 candidate directions");
  if (X.points.empty()) throw std::invalid_argument("empty point set");

  const double delta = X.delta;
  const double alpha1 = X.alpha - 1.0;
  const double log1d = std::log2(1.0 / delta);
  const double budget = std::max(1.0, X.kt_constant) * std::max(1.0, log1d) * std::max(1.0, log1d);

  SliceDecomposition best;
  double best_score = std::numeric_limits<double>::infinity();
  int failing = 0;

  for (int c = 0; c < candidates; ++c) {
    double angle = sector.center - sector.width / 2.0 +
                   sector.width * (c + 0.5) / static_cast<double>(candidates);
    Vec2 dir{std::cos(angle), std::sin(angle)};
    Vec2 normal{-dir.y, dir.x};

    // half-open delta-intervals anchored at 0 on the projection axis
    std::map<int, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < X.points.size(); ++i) {
      int idx = static_cast<int>(std::floor(X.points[i].dot(normal) / delta));
      buckets[idx].push_back(i);
    }
    std::vector<int> keys;
    std::vector<double> counts;
    for (auto& [k, v] : buckets) {
      keys.push_back(k);
      counts.push_back(static_cast<double>(v.size()));
    }
    PigeonholeResult ph = dyadic_pigeonhole(counts, delta);

    SliceDecomposition cand;
    cand.direction = dir;
    cand.kt_budget = budget;
    double score = 0.0;
    for (std::size_t bi : ph.indices) {
      Tube t;
      t.index = keys[bi];
      t.offset = t.index * delta;
      t.members = buckets[keys[bi]];
      std::vector<Vec2> pts;
      pts.reserve(t.members.size());
      for (auto m : t.members) pts.push_back(X.points[m]);
      t.kt_constant_alpha_minus_1 = katz_tao_constant(pts, delta, alpha1);
      score = std::max(score, t.kt_constant_alpha_minus_1);
      for (auto m : t.members) cand.refined_points.push_back(m);
      cand.tubes.push_back(std::move(t));
    }
    cand.retention = static_cast<double>(cand.refined_points.size()) /
                     static_cast<double>(X.points.size());
    if (score > budget) ++failing;
    if (score < best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  best.epsilon0 = static_cast<double>(failing) / static_cast<double>(candidates);
  return best;
}

/// Circle family over a Katz-Tao base: each center carries m radii in
/// [1,2] cap delta*Z.
struct CircleFamily {
  KatzTaoSet base;
  std::vector<std::vector<double>> radii;  // radii[i] sorted, size m

  std::size_t m() const { return radii.empty() ? 0 : radii[0].size(); }
  std::size_t circle_count() const {
    std::size_t n = 0;
    for (const auto& r : radii) n += r.size();
    return n;
  }
};

/// Random m-element radius sets R_x in [1,2] cap delta*Z (equal cardinality
/// enforced by construction).
inline CircleFamily make_circle_family(KatzTaoSet base, std::size_t m, std::uint64_t seed) {
  CircleFamily fam;
  double delta = base.delta;
  std::size_t slots = static_cast<std::size_t>(std::floor(1.0 / delta)) + 1;
  if (m > slots) throw std::invalid_argument("m exceeds the radius grid");
  Rng rng(seed);
  fam.radii.resize(base.points.size());
  std::vector<std::size_t> idx(slots);
  for (auto& rx : fam.radii) {
    for (std::size_t i = 0; i < slots; ++i) idx[i] = i;
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(slots - i));
      std::swap(idx[i], idx[j]);
    }
    rx.resize(m);
    for (std::size_t i = 0; i < m; ++i) rx[i] = 1.0 + static_cast<double>(idx[i]) * delta;
    std::sort(rx.begin(), rx.end());
  }
  fam.base = std::move(base);
  return fam;
}

/// Pixel-counted sum over ordered circle pairs of |C*_delta cap C*_delta|
/// restricted to arc number `arc_index` (one of 100 equal arcs, index 25 is
/// the upper arc). Centers must share their y-coordinate to within delta.
inline double slice_l2_overlap(const std::vector<Vec2>& slice_points,
                               const std::vector<std::vector<double>>& radii, double delta,
                               int arc_index, int resolution_divisor = 16) {
  if (slice_points.empty() || radii.size() != slice_points.size())
    throw std::invalid_argument("points/radii mismatch");
  if (arc_index < 0 || arc_index >= 100) throw std::invalid_argument("arc_index in 0..99");
  double y0 = slice_points[0].y;
  for (Vec2 p : slice_points)
    if (std::abs(p.y - y0) > delta) throw std::invalid_argument("points not collinear within delta");

  const double a0 = 2.0 * kPi * arc_index / 100.0;
  const double a1 = 2.0 * kPi * (arc_index + 1) / 100.0;
  const double px = delta / resolution_divisor;

  struct Arc {
    Vec2 c;
    double r;
  };
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < slice_points.size(); ++i)
    for (double r : radii[i]) arcs.push_back({slice_points[i], r});

  auto arc_bbox = [&](const Arc& a, double& xlo, double& xhi, double& ylo, double& yhi) {
    xlo = ylo = std::numeric_limits<double>::infinity();
    xhi = yhi = -std::numeric_limits<double>::infinity();
    const int samples = 64;
    for (int s = 0; s <= samples; ++s) {
      double th = a0 + (a1 - a0) * s / samples;
      double x = a.c.x + a.r * std::cos(th);
      double y = a.c.y + a.r * std::sin(th);
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
    xlo -= 2 * delta;
    xhi += 2 * delta;
    ylo -= 2 * delta;
    yhi += 2 * delta;
  };

  auto member = [&](const Arc& a, double x, double y) {
    double dx = x - a.c.x, dy = y - a.c.y;
    double d2 = dx * dx + dy * dy;
    double lo = a.r - delta, hi = a.r + delta;
    if (d2 < lo * lo || d2 >= hi * hi) return false;
    double ang = std::atan2(dy, dx);
    if (ang < 0) ang += 2.0 * kPi;
    return ang >= a0 && ang < a1;
  };

  double total = 0.0;
  for (const Arc& A : arcs) {
    double Axlo, Axhi, Aylo, Ayhi;
    arc_bbox(A, Axlo, Axhi, Aylo, Ayhi);
    for (const Arc& B : arcs) {
      double Bxlo, Bxhi, Bylo, Byhi;
      arc_bbox(B, Bxlo, Bxhi, Bylo, Byhi);
      double xlo = std::max(Axlo, Bxlo), xhi = std::min(Axhi, Bxhi);
      double ylo = std::max(Aylo, Bylo), yhi = std::min(Ayhi, Byhi);
      if (xlo >= xhi || ylo >= yhi) continue;
      long count = 0;
      for (double y = ylo + px / 2; y < yhi; y += px)
        for (double x = xlo + px / 2; x < xhi; x += px)
          if (member(A, x, y) && member(B, x, y)) ++count;
      total += static_cast<double>(count) * px * px;
    }
  }
  return total;
}

}  // namespace annulus

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "annulus/circle.hpp"
#include "annulus/core.hpp"

namespace annulus {

struct IncidenceResult {
  int rect_count = 0;
  double bound = 0.0;  // (#W/mu + #B/nu)^(3/2)
  /// rect_count / bound; the incidence proposition hides C_eps delta^-eps,
  /// so this ratio is reported rather than asserted against a constant.
  double ratio() const { return bound > 0.0 ? rect_count / bound : 0.0; }
};

namespace detail {

/// delta-tangency of a circle to the rectangle on `host` at `angle`: the
/// candidate circle must run along the whole arc within 2*delta.
inline bool tangent_to_rectangle(const Circle& host, double angle, double arc_length,
                                 double delta, const Circle& c) {
  int n = std::max(4, static_cast<int>(std::ceil(3.0 * arc_length / delta)));
  double half = arc_length / (2.0 * host.radius);
  for (int i = 0; i <= n; ++i) {
    double a = angle - half + 2.0 * half * i / n;
    Vec2 p{host.center.x + host.radius * std::cos(a), host.center.y + host.radius * std::sin(a)};
    if (std::abs(dist(p, c.center) - c.radius) > 2.0 * delta) return false;
  }
  return true;
}

}  // namespace detail

/// Greedy maximal family of pairwise 100-incomparable (delta,t)-rectangles,
/// each delta-tangent to at least mu circles of W and nu circles of B.
/// Candidates are all arcs of length sqrt(delta/t) on every circle of W u B,
/// visited in input order (deterministic given a seed-ordered input).
inline IncidenceResult incidence_count_experiment(const std::vector<Circle>& W,
                                                  const std::vector<Circle>& B, double delta,
                                                  double t, int mu, int nu) {
  if (W.empty() || B.empty()) throw std::invalid_argument("empty circle set");
  if (!(delta > 0.0) || !(t >= delta)) throw std::invalid_argument("need 0 < delta <= t");
  if (mu < 1 || nu < 1) throw std::invalid_argument("mu, nu must be >= 1");

  // preconditions: diameter <= 6t in parameter space, all (w,b) pairs
  // t/10-separated
  std::vector<Circle> all(W);
  all.insert(all.end(), B.begin(), B.end());
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (parameter_dist(all[i], all[j]) > 6.0 * t)
        throw std::invalid_argument("separation: W u B has parameter diameter > 6t");
  for (const Circle& w : W)
    for (const Circle& b : B)
      if (parameter_dist(w, b) < t / 10.0)
        throw std::invalid_argument("separation: some (w,b) pair is closer than t/10");

  const double arc_length = std::sqrt(delta / t);

  struct Kept {
    TangencyRectangle rect;
  };
  std::vector<Kept> kept;

  // Cheap prefilter for tangency: tangency parameter small and tangency
  // point angularly close to the arc.
  auto maybe_tangent = [&](const Circle& host, double angle, const Circle& c) {
    auto tp = tangency_params(host, c);
    if (tp.delta_param > 4.0 * delta) return false;
    Vec2 sep = c.center - host.center;
    double d = sep.norm();
    if (d < 1e-12) return true;  // concentric-ish, decide by samples
    double sgn = host.radius >= c.radius ? 1.0 : -1.0;
    // internal tangency point direction from host center (Lemma-style arc
    // center x - r sgn(r-s) (x-y)/|x-y|)
    double tang_angle = std::atan2(sgn * sep.y, sgn * sep.x);
    double halfspan = arc_length / (2.0 * host.radius) + 4.0 * delta / arc_length;
    return detail::angle_diff(tang_angle, angle) <= halfspan + 0.25;
  };

  IncidenceResult out;
  out.bound = std::pow(static_cast<double>(W.size()) / mu + static_cast<double>(B.size()) / nu,
                       1.5);

  for (const Circle& host : all) {
    int n_arcs = std::max(1, static_cast<int>(std::ceil(2.0 * kPi * host.radius / arc_length)));
    for (int a = 0; a < n_arcs; ++a) {
      double angle = 2.0 * kPi * a / n_arcs;
      int w_count = 0;
      for (const Circle& c : W)
        if (maybe_tangent(host, angle, c) &&
            detail::tangent_to_rectangle(host, angle, arc_length, delta, c))
          ++w_count;
      if (w_count < mu) continue;
      int b_count = 0;
      for (const Circle& c : B)
        if (maybe_tangent(host, angle, c) &&
            detail::tangent_to_rectangle(host, angle, arc_length, delta, c))
          ++b_count;
      if (b_count < nu) continue;

      TangencyRectangle cand{host, angle, delta, t};
      bool incomparable = true;
      for (const Kept& k : kept) {
        if (comparable(cand, k.rect, 100.0)) {
          incomparable = false;
          break;
        }
      }
      if (incomparable) kept.push_back({cand});
    }
  }
  out.rect_count = static_cast<int>(kept.size());
  return out;
}

}  // namespace annulus

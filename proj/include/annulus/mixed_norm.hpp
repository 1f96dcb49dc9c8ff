#pragma once

#include <stdexcept>
#include <vector>

#include "annulus/averaging.hpp"
#include "annulus/core.hpp"
#include "annulus/grid.hpp"
#include "annulus/measure.hpp"
#include "annulus/slicing.hpp"

namespace annulus {

/// Exponent tuple (p, q, s, alpha); infinity is a legal exponent with sup
/// semantics throughout.
struct NormParams {
  double p = 2.0;
  double q = 2.0;
  double s = 2.0;
  double alpha = 1.0;

  void validate() const {
    if (p < 1.0 || q < 1.0 || s < 1.0) throw std::invalid_argument("exponents must be >= 1");
    if (!(alpha > 0.0) || alpha > 2.0) throw std::invalid_argument("invalid alpha");
  }
};

/// F sampled on support(nu) x r_grid, row-major (one row per support point).
struct SampledField {
  std::vector<double> r_grid;
  std::vector<double> values;  // size = support * r_grid.size()

  double at(std::size_t xi, std::size_t ri) const { return values[xi * r_grid.size() + ri]; }
};

/// Samples A_delta f over the measure support and a radius grid.
inline SampledField sample_averages(const GridFunction& f, const DiscreteMeasure& nu,
                                    const std::vector<double>& r_grid, double delta) {
  SampledField F;
  F.r_grid = r_grid;
  F.values.reserve(nu.support_size() * r_grid.size());
  for (Vec2 x : nu.support_centers()) {
    auto prof = average_profile(f, x, r_grid, delta);
    F.values.insert(F.values.end(), prof.begin(), prof.end());
  }
  return F;
}

/// Weighted mixed norm ( sum_x nu(x) ( sum_r F^s r_weight )^(q/s) )^(1/q)
/// with sup semantics for infinite exponents.
inline double mixed_norm(const SampledField& F, const DiscreteMeasure& nu, double q, double s,
                         double r_weight) {
  if (q < 1.0 || s < 1.0) throw std::invalid_argument("exponents must be >= 1");
  const std::size_t nr = F.r_grid.size();
  if (F.values.size() != nu.support_size() * nr)
    throw std::invalid_argument("field/measure shape mismatch");
  for (double v : F.values)
    if (v < 0.0) throw std::invalid_argument("negative field value");

  double outer_acc = 0.0;
  double outer_max = 0.0;
  for (std::size_t xi = 0; xi < nu.support_size(); ++xi) {
    double inner;
    if (is_inf(s)) {
      inner = 0.0;
      for (std::size_t ri = 0; ri < nr; ++ri) inner = std::max(inner, F.at(xi, ri));
    } else {
      double acc = 0.0;
      for (std::size_t ri = 0; ri < nr; ++ri) acc += std::pow(F.at(xi, ri), s) * r_weight;
      inner = std::pow(acc, 1.0 / s);
    }
    if (is_inf(q)) {
      if (nu.weights()[xi] > 0.0) outer_max = std::max(outer_max, inner);
    } else {
      outer_acc += nu.weights()[xi] * std::pow(inner, q);
    }
  }
  return is_inf(q) ? outer_max : std::pow(outer_acc, 1.0 / q);
}

/// L^p' norm of the multiplicity function sum_ij chi_{S_{10 delta}(x_i, r_j)}
/// rasterized on `spec`. The annuli must all fit inside the grid extent.
inline double dual_counting_norm(const CircleFamily& family, double pprime,
                                 const GridSpec& spec) {
  if (pprime < 1.0) throw std::invalid_argument("invalid exponent");
  const double t = 10.0 * family.base.delta;
  double gx1 = spec.origin.x + spec.nx * spec.delta;
  double gy1 = spec.origin.y + spec.ny * spec.delta;
  MultiplicityGrid grid(spec);
  for (std::size_t i = 0; i < family.base.points.size(); ++i) {
    Vec2 x = family.base.points[i];
    for (double r : family.radii[i]) {
      double reach = r + t;
      if (x.x - reach < spec.origin.x || x.y - reach < spec.origin.y || x.x + reach > gx1 ||
          x.y + reach > gy1)
        throw std::invalid_argument("annulus exceeds grid extent");
      grid.add_annulus(x, r, t, 1.0);
    }
  }
  return grid.lp_norm(pprime);
}

/// Right-hand side (m delta)^(1/s') delta^(-alpha/q) (#X)^(1/q') of the
/// dual counting estimate, with 1/inf = 0 conventions.
inline double theorem_rhs(const NormParams& params, double delta, std::size_t m,
                          std::size_t count_X) {
  if (m < 1 || count_X < 1) throw std::invalid_argument("need m >= 1 and #X >= 1");
  params.validate();
  double sp = conjugate_exponent(params.s);
  double qp = conjugate_exponent(params.q);
  double md = static_cast<double>(m) * delta;
  return std::pow(md, inv_exp(sp)) * std::pow(delta, -params.alpha * inv_exp(params.q)) *
         std::pow(static_cast<double>(count_X), inv_exp(qp));
}

}  // namespace annulus

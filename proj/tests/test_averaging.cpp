#include "annulus/averaging.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace annulus;

namespace {

GridFunction constant_one(int k) {
  GridFunction::Builder b(GridSpec::standard(k));
  b.add_constant(1.0);
  return std::move(b).build();
}

GridFunction example1_f(int grid_k, double delta) {
  GridFunction::Builder b(GridSpec::standard(grid_k));
  b.add_annulus({0.0, 0.0}, 1.0, delta, 1.0);
  return std::move(b).build();
}

}  // namespace

TEST_SUITE_BEGIN("averaging");

TEST_CASE("averaging a constant gives 1 within 3% when delta >= 8 grid delta") {
  auto f = constant_one(7);
  double delta = std::pow(2.0, -4);
  for (double r : {1.0, 1.4, 2.0}) {
    double v = discretized_average(f, {0.1, -0.05}, r, delta);
    CHECK(v == doctest::Approx(1.0).epsilon(0.03));
  }
}

TEST_CASE("example 1 profile: averaging the annulus against itself is ~1") {
  double delta = std::pow(2.0, -6);
  auto f = example1_f(9, delta);
  double v = discretized_average(f, {0.0, 0.0}, 1.0, delta);
  CHECK(v >= 0.5);
  CHECK(v <= 1.5);
}

TEST_CASE("example 3 kernel: averaging a delta-ball at matched radius is ~delta") {
  double delta = std::pow(2.0, -6);
  GridFunction::Builder b(GridSpec::standard(10));
  b.add_disk({0.0, 0.0}, delta, 1.0);
  auto f = std::move(b).build();
  Vec2 x{0.2, 0.0};
  double v = discretized_average(f, x, 0.2, delta);
  CHECK(v >= delta / 4.0);
  CHECK(v <= delta * 4.0);
}

TEST_CASE("preconditions: scale and extent") {
  auto f = constant_one(5);
  CHECK_THROWS_AS(discretized_average(f, {0.0, 0.0}, 1.0, std::pow(2.0, -6)),
                  std::invalid_argument);
  CHECK_THROWS_AS(discretized_average(f, {2.9, 0.0}, 1.0, std::pow(2.0, -4)),
                  std::invalid_argument);
}

TEST_CASE("profile equals per-radius evaluation on the uniform delta grid") {
  double delta = std::pow(2.0, -5);
  auto f = example1_f(8, delta);
  Vec2 x{0.07, -0.12};
  auto grid = radius_grid(1.0, 2.0, delta);
  auto prof = average_profile(f, x, grid, delta);
  REQUIRE(prof.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double direct = discretized_average(f, x, grid[i], delta);
    CHECK(prof[i] == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("profile of a constant is constant; far support reads zero") {
  double delta = std::pow(2.0, -4);
  auto f = constant_one(7);
  auto grid = radius_grid(1.0, 1.5, delta);
  auto prof = average_profile(f, {0.0, 0.0}, grid, delta);
  for (double v : prof) CHECK(v == doctest::Approx(1.0).epsilon(0.03));

  GridFunction::Builder b(GridSpec::standard(7));
  b.add_disk({0.0, 0.0}, 0.5, 1.0);
  auto g = std::move(b).build();
  auto prof2 = average_profile(g, {0.0, 0.0}, radius_grid(1.0, 2.0, delta), delta);
  for (double v : prof2) CHECK(v == 0.0);
}

TEST_CASE("example 1 profile has a single narrow bump near r = 1") {
  double delta = std::pow(2.0, -6);
  auto f = example1_f(9, delta);
  auto grid = radius_grid(1.0 - 16 * delta > 0.9 ? 0.9 : 0.9, 1.3, delta);
  auto prof = average_profile(f, {0.004, 0.002}, grid, delta);
  double peak = 0.0;
  double peak_r = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (prof[i] > peak) {
      peak = prof[i];
      peak_r = grid[i];
    }
  CHECK(peak >= 0.5);
  CHECK(std::abs(peak_r - 1.0) <= 4 * delta);
  // support of the bump is a few delta wide
  int nonzero = 0;
  for (double v : prof)
    if (v > 1e-9) ++nonzero;
  CHECK(nonzero <= 8);
}

TEST_CASE("locally constant domination with the shell-area factor") {
  double delta = std::pow(2.0, -5);
  auto f = example1_f(8, delta);
  Rng rng(51);
  for (int rep = 0; rep < 20; ++rep) {
    Vec2 x{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
    double r = rng.uniform(1.0, 1.8);
    double a = rng.uniform(0.0, 2 * kPi), frac = rng.uniform(0.0, 1.0);
    Vec2 xb{x.x + delta * frac * std::cos(a), x.y + delta * frac * std::sin(a)};
    double rb = r + delta * (1.0 - frac);
    double lhs = discretized_average(f, x, r, delta);
    double rhs = discretized_average(f, xb, rb, 10 * delta);
    double area_factor = Annulus::shell_area(rb, 10 * delta) / Annulus::shell_area(r, delta);
    CHECK(lhs <= rhs * area_factor + 1e-12);
  }
}

TEST_CASE("monotone in f: f <= g implies averages ordered") {
  double delta = std::pow(2.0, -5);
  GridSpec spec = GridSpec::standard(8);
  GridFunction::Builder bf(spec);
  bf.add_annulus({0.0, 0.0}, 1.0, delta, 0.7);
  auto f = std::move(bf).build();
  GridFunction::Builder bg(spec);
  bg.add_annulus({0.0, 0.0}, 1.0, delta, 0.7);
  bg.add_disk({0.0, 0.0}, 1.2, 0.3);
  auto g = std::move(bg).build();  // g >= f pointwise (max combine keeps 0.7 over the annulus)
  Rng rng(53);
  for (int rep = 0; rep < 10; ++rep) {
    Vec2 x{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    double r = rng.uniform(1.0, 2.0);
    CHECK(discretized_average(f, x, r, delta) <=
          discretized_average(g, x, r, delta) + 1e-12);
  }
}

TEST_CASE("scale consistency: S_delta cells are a subset of S_2delta cells") {
  GridSpec spec = GridSpec::standard(6);
  Rng rng(57);
  for (int rep = 0; rep < 10; ++rep) {
    Vec2 x{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    double r = rng.uniform(1.0, 2.0);
    double delta = std::pow(2.0, -4);
    auto fine = annulus_spans(x, r, delta, spec);
    auto coarse = annulus_spans(x, r, 2 * delta, spec);
    std::vector<std::pair<int, int>> fc, cc;
    for (const auto& s : fine)
      for (int c = s.c0; c < s.c1; ++c) fc.emplace_back(c, s.iy);
    for (const auto& s : coarse)
      for (int c = s.c0; c < s.c1; ++c) cc.emplace_back(c, s.iy);
    std::sort(cc.begin(), cc.end());
    for (auto& cell : fc) CHECK(std::binary_search(cc.begin(), cc.end(), cell));
  }
}

TEST_SUITE_END();

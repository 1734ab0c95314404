#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "pinnlab/sobol.hpp"

using namespace pinnlab;

namespace {

// Brute-force star-discrepancy estimate over boxes [0,a)x[0,b) with corners
// drawn from the point coordinates and 1.
double star_discrepancy(const std::vector<std::array<double, 2>>& pts) {
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    xs.push_back(p[0]);
    ys.push_back(p[1]);
  }
  xs.push_back(1.0);
  ys.push_back(1.0);
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(pts.size());
  double worst = 0.0;
  for (double a : xs) {
    for (double b : ys) {
      int lt = 0, le = 0;
      for (const auto& p : pts) {
        if (p[0] < a && p[1] < b) ++lt;
        if (p[0] <= a && p[1] <= b) ++le;
      }
      worst = std::max(worst, std::abs(lt / n - a * b));
      worst = std::max(worst, std::abs(le / n - a * b));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("first non-zero Sobol points match the reference table") {
  const auto pts = sobol_2d(3);
  CHECK(pts[0][0] == 0.5);
  CHECK(pts[0][1] == 0.5);
  CHECK(pts[1][0] == 0.75);
  CHECK(pts[1][1] == 0.25);
  CHECK(pts[2][0] == 0.25);
  CHECK(pts[2][1] == 0.75);
}

TEST_CASE("zero point kept only when requested") {
  const auto with_zero = sobol_2d(2, /*skip_zero=*/false);
  CHECK(with_zero[0][0] == 0.0);
  CHECK(with_zero[0][1] == 0.0);
  CHECK(with_zero[1][0] == 0.5);
}

TEST_CASE("all coordinates lie in [0,1)") {
  for (const auto& p : sobol_2d(4096)) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] < 1.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] < 1.0);
  }
}

TEST_CASE("no duplicate points in a dyadic block") {
  auto pts = sobol_2d(1024);
  std::sort(pts.begin(), pts.end());
  CHECK(std::adjacent_find(pts.begin(), pts.end()) == pts.end());
}

TEST_CASE("Sobol beats the median uniform-random star discrepancy at n=256") {
  const double d_sobol = star_discrepancy(sobol_2d(256));
  std::vector<double> d_rand;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed * 7919 + 13);
    std::vector<std::array<double, 2>> pts(256);
    for (auto& p : pts) {
      p[0] = (rng() >> 11) * 0x1p-53;
      p[1] = (rng() >> 11) * 0x1p-53;
    }
    d_rand.push_back(star_discrepancy(pts));
  }
  std::sort(d_rand.begin(), d_rand.end());
  const double median = 0.5 * (d_rand[9] + d_rand[10]);
  CHECK(d_sobol < median);
}

#include <gtest/gtest.h>

#include <atvis/diffops.hpp>
#include <atvis/metrics.hpp>

#include <algorithm>

#include "test_util.hpp"

using namespace atvis;

TEST(Rlne, Basics) {
  std::mt19937_64 rng(1);
  const auto ref = testutil::random_image(6, 6, rng);
  EXPECT_EQ(rlne(ref, ref), 0.0);
  EXPECT_DOUBLE_EQ(rlne(ComplexImage(6, 6), ref), 1.0);
  for (double a : {0.0, 0.5, 1.5, -2.0}) EXPECT_NEAR(rlne(ref * cplx(a), ref), std::abs(a - 1.0), 1e-14);
  EXPECT_THROW((void)rlne(ref, ComplexImage(6, 6)), InvalidArgument);
  EXPECT_THROW((void)rlne(ref, ComplexImage(5, 6)), DimensionError);
}

TEST(SheppLogan, RangeAndSupport) {
  const auto p = shepp_logan(128);
  for (const auto& v : p) {
    EXPECT_GE(v.real(), 0.0);
    EXPECT_LE(v.real(), 1.0);
    EXPECT_EQ(v.imag(), 0.0);
  }
  EXPECT_EQ(p(0, 0), cplx(0.0));
  EXPECT_EQ(p(0, 127), cplx(0.0));
  EXPECT_EQ(p(127, 0), cplx(0.0));
  EXPECT_EQ(p(127, 127), cplx(0.0));
  EXPECT_THROW((void)shepp_logan(16), DimensionError);
}

TEST(SheppLogan, MatchesIndependentRasterization) {
  // Second rasterization of the outer two ellipses only: inside the skull,
  // outside the brain the value is exactly 1.
  const std::size_t n = 256;
  const auto p = shepp_logan(n);
  std::size_t checked = 0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double x = (2.0 * c - (n - 1.0)) / n;
      const double y = ((n - 1.0) - 2.0 * r) / n;
      const bool skull = (x / 0.69) * (x / 0.69) + (y / 0.92) * (y / 0.92) <= 1.0;
      const bool brain = (x / 0.6624) * (x / 0.6624) + ((y + 0.0184) / 0.874) * ((y + 0.0184) / 0.874) <= 1.0;
      if (!skull) {
        EXPECT_EQ(p(r, c), cplx(0.0));
      }
      if (skull && !brain) {
        EXPECT_EQ(p(r, c), cplx(1.0));
        ++checked;
      }
    }
  EXPECT_GT(checked, 1000u);
  double s1 = 0.0, s2 = 0.0;
  for (const auto& v : p) s1 += v.real();
  for (const auto& v : shepp_logan(n)) s2 += v.real();
  EXPECT_EQ(s1, s2);
}

TEST(GeometricPhantom, DeterministicRangeAndSparse) {
  for (std::uint64_t seed : {1u, 3u, 5u, 42u}) {
    const auto a = geometric_phantom(128, seed);
    EXPECT_EQ(a, geometric_phantom(128, seed));
    for (const auto& v : a) {
      EXPECT_GE(v.real(), 0.0);
      EXPECT_LE(v.real(), 1.0);
    }
    const auto d = grad(a, BoundaryCondition::pbc);
    std::size_t nz = 0;
    for (std::size_t i = 0; i < d.dx.size(); ++i) nz += (d.dx[i] != cplx(0.0)) + (d.dy[i] != cplx(0.0));
    EXPECT_LE(double(nz) / double(d.count()), 0.15);
    EXPECT_GT(nz, 0u);
  }
  EXPECT_NE(geometric_phantom(64, 1), geometric_phantom(64, 2));
}

TEST(SosCombine, Examples) {
  std::mt19937_64 rng(2);
  const auto u = testutil::random_image(5, 4, rng);
  const auto one = sos_combine({u});
  const auto two = sos_combine({u, u});
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_NEAR(one[i].real(), std::abs(u[i]), 1e-15);
    EXPECT_NEAR(two[i].real(), std::sqrt(2.0) * std::abs(u[i]), 1e-14);
    EXPECT_EQ(two[i].imag(), 0.0);
    EXPECT_GE(two[i].real(), 0.0);
  }
  const auto v = testutil::random_image(5, 4, rng);
  const auto w = testutil::random_image(5, 4, rng);
  EXPECT_LT(testutil::max_abs_diff(sos_combine({u, v, w}), sos_combine({w, u, v})), 1e-14);
  EXPECT_THROW((void)sos_combine({}), InvalidArgument);
  EXPECT_THROW((void)sos_combine({u, ComplexImage(4, 5)}), DimensionError);
}

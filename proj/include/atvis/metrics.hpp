#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "atvis/image.hpp"

namespace atvis {

/// ||u - ref|| / ||ref||.
[[nodiscard]] inline double rlne(const ComplexImage& u, const ComplexImage& ref) {
  if (!u.same_shape(ref)) throw DimensionError("rlne: shape mismatch");
  const double den = l2_norm(ref);
  if (!(den > 0.0)) throw InvalidArgument("rlne: reference has zero norm");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::norm(u[i] - ref[i]);
  return std::sqrt(s) / den;
}

/// Shepp-Logan with the higher-contrast intensities commonly used for
/// display, clipped to [0, 1].
[[nodiscard]] inline ComplexImage shepp_logan(std::size_t n) {
  if (n < 32) throw DimensionError("shepp_logan: size must be >= 32");
  struct Ellipse {
    double amp, a, b, x0, y0, deg;
  };
  static constexpr std::array<Ellipse, 10> ellipses{{
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
      {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
      {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
      {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  }};
  const double nn = static_cast<double>(n);
  ComplexImage img(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const double y = ((nn - 1.0) - 2.0 * static_cast<double>(r)) / nn;
    for (std::size_t c = 0; c < n; ++c) {
      const double x = (2.0 * static_cast<double>(c) - (nn - 1.0)) / nn;
      double v = 0.0;
      for (const auto& e : ellipses) {
        const double t = e.deg * std::numbers::pi / 180.0;
        const double ct = std::cos(t);
        const double st = std::sin(t);
        const double xr = (x - e.x0) * ct + (y - e.y0) * st;
        const double yr = -(x - e.x0) * st + (y - e.y0) * ct;
        if ((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) <= 1.0) v += e.amp;
      }
      img(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

/// Piecewise-constant disks and rectangles with seeded geometry and
/// intensities in [0.2, 1] on a zero background.
[[nodiscard]] inline ComplexImage geometric_phantom(std::size_t n, std::uint64_t seed) {
  if (n < 32) throw DimensionError("geometric_phantom: size must be >= 32");
  std::mt19937_64 rng(seed);
  const double nn = static_cast<double>(n);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  ComplexImage img(n, n);
  for (int i = 0; i < 8; ++i) {
    const double v = uni(0.2, 1.0);
    if (i % 2 == 0) {
      const double cx = uni(0.2 * nn, 0.8 * nn);
      const double cy = uni(0.2 * nn, 0.8 * nn);
      const double rad = uni(0.05 * nn, 0.18 * nn);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          const double dx = static_cast<double>(c) - cx;
          const double dy = static_cast<double>(r) - cy;
          if (dx * dx + dy * dy <= rad * rad) img(r, c) = v;
        }
    } else {
      const double x0 = uni(0.15 * nn, 0.6 * nn);
      const double y0 = uni(0.15 * nn, 0.6 * nn);
      const double w = uni(0.08 * nn, 0.25 * nn);
      const double h = uni(0.08 * nn, 0.25 * nn);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          const double x = static_cast<double>(c);
          const double y = static_cast<double>(r);
          if (x >= x0 && x < x0 + w && y >= y0 && y < y0 + h) img(r, c) = v;
        }
    }
  }
  return img;
}

/// Pixelwise sqrt(sum |U_c|^2), returned as a real-valued complex image.
[[nodiscard]] inline ComplexImage sos_combine(const std::vector<ComplexImage>& channels) {
  if (channels.empty()) throw InvalidArgument("sos_combine: no channels");
  ComplexImage out(channels.front().rows(), channels.front().cols());
  std::vector<double> acc(out.size(), 0.0);
  for (const auto& ch : channels) {
    if (!ch.same_shape(out)) throw DimensionError("sos_combine: channel shape mismatch");
    for (std::size_t i = 0; i < ch.size(); ++i) acc[i] += std::norm(ch[i]);
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(acc[i]);
  return out;
}

struct TraceRecord {
  int iter = 0;
  double beta = 0.0;
  double rlne = std::numeric_limits<double>::quiet_NaN();  // NaN without a reference
  double l1_eps_res = 0.0;
  double l1_eps_n = 0.0;
  double d1 = 0.0;
  double elapsed_ms = 0.0;
  bool zero_denominator = false;
};

}  // namespace atvis

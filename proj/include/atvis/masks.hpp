#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "atvis/forward.hpp"

namespace atvis {

inline constexpr double kGoldenAngleDeg = 111.246;
inline constexpr double kGoldenFraction = 0.6180339887;
inline constexpr double kVdExponent = 2.0;

/// Side of the fully sampled square core holding central_frac of all samples.
[[nodiscard]] inline std::size_t vd_core_side(std::size_t n, std::size_t m, double central_frac) {
  const auto side = static_cast<std::size_t>(std::lround(std::sqrt(central_frac * static_cast<double>(n * m))));
  return std::min({side, n, m});
}

/// Fully sampled centered square core plus a weighted draw without
/// replacement, weight (1 + r/r_max)^-2, for an exact total of
/// round(frac*N*M) samples.
[[nodiscard]] inline SamplingMask variable_density_mask(std::size_t n, std::size_t m, double frac, double central_frac,
                                                       std::uint64_t seed) {
  if (n < 1 || m < 1) throw DimensionError("variable_density_mask: empty size");
  if (!(frac > 0.0 && frac <= 1.0)) throw InvalidArgument("variable_density_mask: frac must be in (0, 1]");
  if (!(central_frac > 0.0 && central_frac < frac))
    throw InvalidArgument("variable_density_mask: central_frac must be in (0, frac)");
  const std::size_t total = n * m;
  const auto budget = static_cast<std::size_t>(std::llround(frac * static_cast<double>(total)));
  SamplingMask mask(n, m);
  const std::size_t side = vd_core_side(n, m, central_frac);
  const std::size_t r0 = n / 2 - side / 2;
  const std::size_t c0 = m / 2 - side / 2;
  for (std::size_t r = r0; r < r0 + side; ++r)
    for (std::size_t c = c0; c < c0 + side; ++c) mask.set(r, c);
  const std::size_t core = side * side;
  if (core > budget) throw InvalidArgument("variable_density_mask: core exceeds the sample budget");

  // Weighted sampling without replacement via exponential keys: the k
  // largest log(u)/w are a draw proportional to w.
  const double cr = static_cast<double>(n / 2);
  const double cc = static_cast<double>(m / 2);
  const double rmax = std::hypot(std::max(cr, static_cast<double>(n - 1) - cr), std::max(cc, static_cast<double>(m - 1) - cc));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(total - core);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      if (mask(r, c)) continue;
      const double rad = std::hypot(static_cast<double>(r) - cr, static_cast<double>(c) - cc);
      const double w = std::pow(1.0 + rad / rmax, -kVdExponent);
      double u = unit(rng);
      while (u <= 0.0) u = unit(rng);
      keys.emplace_back(std::log(u) / w, r * m + c);
    }
  }
  const std::size_t need = budget - core;
  std::nth_element(keys.begin(), keys.begin() + static_cast<long>(need), keys.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < need; ++i) mask.set(keys[i].second / m, keys[i].second % m);
  return mask;
}

enum class SpokeSpacing { golden, uniform };

/// Union of diameters through the k-space center, each rasterized by nearest
/// neighbour from max(N, M) unit-spaced points.
[[nodiscard]] inline SamplingMask radial_mask(std::size_t n, std::size_t m, int spokes, SpokeSpacing spacing) {
  if (spokes < 1) throw InvalidArgument("radial_mask: spokes must be >= 1");
  if (n < 1 || m < 1) throw DimensionError("radial_mask: empty size");
  SamplingMask mask(n, m);
  const auto len = static_cast<long>(std::max(n, m));
  const double cr = static_cast<double>(n / 2);
  const double cc = static_cast<double>(m / 2);
  for (int j = 0; j < spokes; ++j) {
    const double deg = spacing == SpokeSpacing::golden ? std::fmod(j * kGoldenAngleDeg, 360.0) : j * 180.0 / spokes;
    const double th = deg * std::numbers::pi / 180.0;
    const double s = std::sin(th);
    const double c = std::cos(th);
    for (long i = 0; i < len; ++i) {
      const double t = static_cast<double>(i - len / 2);
      const long r = std::lround(cr - t * s);
      const long q = std::lround(cc + t * c);
      if (r < 0 || q < 0 || r >= static_cast<long>(n) || q >= static_cast<long>(m)) continue;
      mask.set(static_cast<std::size_t>(r), static_cast<std::size_t>(q));
    }
  }
  return mask;
}

/// First row of the contiguous central block of phase-encode lines.
[[nodiscard]] inline std::size_t phase_encode_core_start(std::size_t n, std::size_t central_lines) {
  return n / 2 - central_lines / 2;
}

/// Full readout rows: a contiguous block of central_lines rows around the
/// center, then rows picked from the remaining ones by the golden-ratio
/// sequence floor(fract(j*0.618...)*R), skipping repeats. The seed shifts
/// the starting index j.
[[nodiscard]] inline SamplingMask phase_encode_mask(std::size_t n, std::size_t m, int lines, int central_lines,
                                                   std::uint64_t seed) {
  if (central_lines < 0 || lines < 1 || central_lines > lines || static_cast<std::size_t>(lines) > n)
    throw InvalidArgument("phase_encode_mask: need 0 <= central_lines <= lines <= rows");
  SamplingMask mask(n, m);
  std::vector<bool> taken(n, false);
  const auto cl = static_cast<std::size_t>(central_lines);
  const std::size_t start = phase_encode_core_start(n, cl);
  for (std::size_t r = start; r < start + cl; ++r) taken[r] = true;

  std::vector<std::size_t> rest;
  for (std::size_t r = 0; r < n; ++r)
    if (!taken[r]) rest.push_back(r);
  std::vector<bool> used(rest.size(), false);
  auto remaining = static_cast<std::size_t>(lines - central_lines);
  const double big_r = static_cast<double>(rest.size());
  const std::size_t max_tries = 100 * rest.size() + 100;
  std::uint64_t j = seed + 1;
  for (std::size_t tries = 0; remaining > 0 && tries < max_tries; ++tries, ++j) {
    const double x = static_cast<double>(j) * kGoldenFraction;
    const auto idx = std::min(rest.size() - 1, static_cast<std::size_t>((x - std::floor(x)) * big_r));
    if (used[idx]) continue;
    used[idx] = true;
    taken[rest[idx]] = true;
    --remaining;
  }
  // The sequence is equidistributed, so this fallback is only a guard.
  for (std::size_t i = 0; remaining > 0 && i < rest.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    taken[rest[i]] = true;
    --remaining;
  }
  for (std::size_t r = 0; r < n; ++r)
    if (taken[r])
      for (std::size_t c = 0; c < m; ++c) mask.set(r, c);
  return mask;
}

}  // namespace atvis

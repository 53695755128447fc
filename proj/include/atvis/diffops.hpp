#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include "atvis/fft.hpp"
#include "atvis/image.hpp"

namespace atvis {

/// sbc: replicate boundary (U[-1] = U[0]); pbc: periodic wrap.
enum class BoundaryCondition { sbc, pbc };

enum class TvMode { isotropic, anisotropic };

inline std::string_view to_string(BoundaryCondition bc) { return bc == BoundaryCondition::sbc ? "sbc" : "pbc"; }
inline std::string_view to_string(TvMode m) { return m == TvMode::isotropic ? "isotropic" : "anisotropic"; }

namespace detail {
inline void require_derivable(std::size_t rows, std::size_t cols, const char* what) {
  if (rows < 2 || cols < 2) throw DimensionError(std::string(what) + ": image must be at least 2x2");
}
}  // namespace detail

/// Backward differences along rows (dx) and columns (dy).
template <Scalar T>
[[nodiscard]] GradientField<T> grad(const Image<T>& u, BoundaryCondition bc) {
  const auto n = u.rows();
  const auto m = u.cols();
  detail::require_derivable(n, m, "grad");
  GradientField<T> d(n, m);
  const bool wrap = bc == BoundaryCondition::pbc;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t rp = r == 0 ? (wrap ? n - 1 : 0) : r - 1;
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t cp = c == 0 ? (wrap ? m - 1 : 0) : c - 1;
      d.dx(r, c) = u(r, c) - u(rp, c);
      d.dy(r, c) = u(r, c) - u(r, cp);
    }
  }
  return d;
}

/// Negative adjoint of grad under the same boundary condition.
template <Scalar T>
[[nodiscard]] Image<T> div(const GradientField<T>& d, BoundaryCondition bc) {
  if (!d.dx.same_shape(d.dy)) throw DimensionError("div: dx/dy shape mismatch");
  const auto n = d.rows();
  const auto m = d.cols();
  detail::require_derivable(n, m, "div");
  Image<T> out(n, m);
  if (bc == BoundaryCondition::pbc) {
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t rn = r + 1 == n ? 0 : r + 1;
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t cn = c + 1 == m ? 0 : c + 1;
        out(r, c) = d.dx(rn, c) - d.dx(r, c) + d.dy(r, cn) - d.dy(r, c);
      }
    }
    return out;
  }
  // Replicate boundary: the first row of dx and first column of dy are
  // identically zero in the range of grad, so the adjoint ignores them.
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      T v{};
      if (r + 1 < n) v += d.dx(r + 1, c);
      if (r > 0) v -= d.dx(r, c);
      if (c + 1 < m) v += d.dy(r, c + 1);
      if (c > 0) v -= d.dy(r, c);
      out(r, c) = v;
    }
  }
  return out;
}

/// Spectral inverse of the discrete Laplacian, with the DC bin pinned to 0.
struct IntegrationFilter {
  RealImage coefficients;
  BoundaryCondition bc = BoundaryCondition::pbc;
};

/// Row index is l (first axis, length N), column index is k (second axis,
/// length M).
[[nodiscard]] inline IntegrationFilter integration_filter(std::size_t n, std::size_t m, BoundaryCondition bc) {
  detail::require_derivable(n, m, "integration_filter");
  const double a = bc == BoundaryCondition::pbc ? 2.0 : 1.0;
  const double pi = std::numbers::pi;
  IntegrationFilter f{RealImage(n, m), bc};
  for (std::size_t l = 0; l < n; ++l) {
    const double cl = 2.0 * std::cos(a * pi * static_cast<double>(l) / static_cast<double>(n));
    for (std::size_t k = 0; k < m; ++k) {
      if (l == 0 && k == 0) continue;
      const double ck = 2.0 * std::cos(a * pi * static_cast<double>(k) / static_cast<double>(m));
      f.coefficients(l, k) = 1.0 / (ck + cl - 4.0);
    }
  }
  return f;
}

/// X(d): maps a derivative field to the zero-mean image whose gradient best
/// matches it.
[[nodiscard]] inline ComplexImage left_inverse(const ComplexField& d, const IntegrationFilter& w) {
  if (!d.dx.same_shape(w.coefficients)) throw DimensionError("left_inverse: filter shape mismatch");
  ComplexImage u = div(d, w.bc);
  const bool periodic = w.bc == BoundaryCondition::pbc;
  periodic ? fft::dft(u) : fft::dct(u);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= w.coefficients[i];
  periodic ? fft::idft(u) : fft::idct(u);
  return u;
}

[[nodiscard]] inline ComplexImage left_inverse(const ComplexField& d, BoundaryCondition bc) {
  if (!d.dx.same_shape(d.dy)) throw DimensionError("left_inverse: dx/dy shape mismatch");
  return left_inverse(d, integration_filter(d.rows(), d.cols(), bc));
}

template <Scalar T>
[[nodiscard]] double tv_norm(const GradientField<T>& d, TvMode mode) {
  if (!d.dx.same_shape(d.dy)) throw DimensionError("tv_norm: dx/dy shape mismatch");
  double s = 0.0;
  if (mode == TvMode::anisotropic) {
    for (std::size_t i = 0; i < d.dx.size(); ++i) s += std::abs(d.dx[i]) + std::abs(d.dy[i]);
  } else {
    for (std::size_t i = 0; i < d.dx.size(); ++i) s += std::sqrt(std::norm(d.dx[i]) + std::norm(d.dy[i]));
  }
  return s;
}

}  // namespace atvis

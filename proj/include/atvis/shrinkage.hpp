#pragma once

#include <cmath>

#include "atvis/diffops.hpp"
#include "atvis/image.hpp"

namespace atvis {

enum class ShrinkMode { componentwise, vector };

namespace detail {
template <Scalar T>
T shrink_scalar(T x, double beta) {
  const double a = std::abs(x);
  if (a <= beta) return T{};
  return x * (1.0 - beta / a);
}
}  // namespace detail

/// Complex soft threshold. componentwise shrinks every entry on its own;
/// vector shrinks the joint (dx, dy) magnitude at each pixel.
template <Scalar T>
[[nodiscard]] GradientField<T> soft_threshold(const GradientField<T>& d, double beta,
                                              ShrinkMode mode = ShrinkMode::componentwise) {
  if (!(beta >= 0.0)) throw InvalidArgument("soft_threshold: beta must be >= 0");
  if (!d.dx.same_shape(d.dy)) throw DimensionError("soft_threshold: dx/dy shape mismatch");
  GradientField<T> out(d.rows(), d.cols());
  if (mode == ShrinkMode::componentwise) {
    for (std::size_t i = 0; i < d.dx.size(); ++i) {
      out.dx[i] = detail::shrink_scalar(d.dx[i], beta);
      out.dy[i] = detail::shrink_scalar(d.dy[i], beta);
    }
    return out;
  }
  for (std::size_t i = 0; i < d.dx.size(); ++i) {
    const double m = std::sqrt(std::norm(d.dx[i]) + std::norm(d.dy[i]));
    if (m <= beta) continue;
    const double s = 1.0 - beta / m;
    out.dx[i] = d.dx[i] * s;
    out.dy[i] = d.dy[i] * s;
  }
  return out;
}

/// Anything with apply() from image to measurement space and adjoint() back.
template <class Op>
concept LinearOperator = requires(const Op& op, const ComplexImage& u) {
  { op.apply(u) } -> std::convertible_to<ComplexImage>;
  { op.adjoint(u) } -> std::convertible_to<ComplexImage>;
};

/// eps_res = grad(A'(y - A X(d))), optionally scaled by a damping factor.
template <LinearOperator Op>
[[nodiscard]] ComplexField landweber_residual(const ComplexField& d, const ComplexImage& y, const Op& op,
                                              const IntegrationFilter& w, double damping = 1.0) {
  if (!d.dx.same_shape(y)) throw DimensionError("landweber_residual: field/data shape mismatch");
  ComplexImage r = y;
  r -= op.apply(left_inverse(d, w));
  ComplexField e = grad(op.adjoint(r), w.bc);
  if (damping != 1.0) e *= cplx(damping);
  return e;
}

template <LinearOperator Op>
[[nodiscard]] ComplexField landweber_residual(const ComplexField& d, const ComplexImage& y, const Op& op,
                                              BoundaryCondition bc, double damping = 1.0) {
  return landweber_residual(d, y, op, integration_filter(d.rows(), d.cols(), bc), damping);
}

/// FISTA momentum bookkeeping.
struct FistaState {
  double t = 1.0;
  ComplexField d_prev;
  ComplexField d_relaxed;

  FistaState() = default;
  FistaState(std::size_t rows, std::size_t cols) : d_prev(rows, cols), d_relaxed(rows, cols) {}
};

[[nodiscard]] inline double fista_next_t(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

/// Advances the momentum and returns the over-relaxed iterate.
inline const ComplexField& fista_step(FistaState& s, const ComplexField& d_new) {
  if (!s.d_prev.same_shape(d_new)) throw DimensionError("fista_step: shape mismatch");
  const double t_new = fista_next_t(s.t);
  const cplx w((s.t - 1.0) / t_new);
  s.d_relaxed = d_new;
  for (std::size_t i = 0; i < d_new.dx.size(); ++i) {
    s.d_relaxed.dx[i] += w * (d_new.dx[i] - s.d_prev.dx[i]);
    s.d_relaxed.dy[i] += w * (d_new.dy[i] - s.d_prev.dy[i]);
  }
  s.d_prev = d_new;
  s.t = t_new;
  return s.d_relaxed;
}

}  // namespace atvis

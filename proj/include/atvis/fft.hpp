#pragma once

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "atvis/image.hpp"

// Orthonormal 2D transforms backed by FFTW. Plans are created once per
// (kind, shape) under a lock; execution uses the new-array interface, which
// FFTW documents as thread-safe.
namespace atvis::fft {

namespace detail {

enum class Kind { dft_forward, dft_backward, dct2, dct3 };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, int rows, int cols) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(kind, rows, cols);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<cplx> scratch(static_cast<std::size_t>(rows) * cols);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    auto* rbuf = reinterpret_cast<double*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::dft_forward:
        plan = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_FORWARD, flags);
        break;
      case Kind::dft_backward:
        plan = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_BACKWARD, flags);
        break;
      case Kind::dct2:
      case Kind::dct3: {
        // Real and imaginary parts are two interleaved real arrays.
        const int n[2] = {rows, cols};
        const fftw_r2r_kind k = kind == Kind::dct2 ? FFTW_REDFT10 : FFTW_REDFT01;
        const fftw_r2r_kind kinds[2] = {k, k};
        plan = fftw_plan_many_r2r(2, n, 2, rbuf, nullptr, 2, 1, rbuf, nullptr, 2, 1, kinds, flags);
        break;
      }
    }
    if (plan == nullptr) throw Error("fft: FFTW planner failed");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<Kind, int, int>, fftw_plan> plans_;
};

inline void execute_dft(Kind kind, ComplexImage& u) {
  fftw_plan plan = PlanCache::instance().get(kind, static_cast<int>(u.rows()), static_cast<int>(u.cols()));
  auto* buf = reinterpret_cast<fftw_complex*>(u.data());
  fftw_execute_dft(plan, buf, buf);
  u *= cplx(1.0 / std::sqrt(static_cast<double>(u.size())));
}

inline double dct2_scale(std::size_t k, std::size_t n) {
  return k == 0 ? std::sqrt(0.25 / static_cast<double>(n)) : std::sqrt(0.5 / static_cast<double>(n));
}

inline double dct3_prescale(std::size_t k, std::size_t n) {
  return k == 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0 / std::sqrt(2.0 * static_cast<double>(n));
}

}  // namespace detail

/// In-place orthonormal forward DFT.
inline void dft(ComplexImage& u) { detail::execute_dft(detail::Kind::dft_forward, u); }

/// In-place orthonormal inverse DFT.
inline void idft(ComplexImage& u) { detail::execute_dft(detail::Kind::dft_backward, u); }

/// In-place orthonormal DCT-II along both axes (real and imaginary parts
/// transformed independently).
inline void dct(ComplexImage& u) {
  const auto rows = u.rows();
  const auto cols = u.cols();
  fftw_plan plan = detail::PlanCache::instance().get(detail::Kind::dct2, static_cast<int>(rows),
                                                     static_cast<int>(cols));
  auto* buf = reinterpret_cast<double*>(u.data());
  fftw_execute_r2r(plan, buf, buf);
  for (std::size_t r = 0; r < rows; ++r) {
    const double sr = detail::dct2_scale(r, rows);
    for (std::size_t c = 0; c < cols; ++c) u(r, c) *= sr * detail::dct2_scale(c, cols);
  }
}

/// In-place orthonormal DCT-III along both axes; inverse of dct().
inline void idct(ComplexImage& u) {
  const auto rows = u.rows();
  const auto cols = u.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    const double sr = detail::dct3_prescale(r, rows);
    for (std::size_t c = 0; c < cols; ++c) u(r, c) *= sr * detail::dct3_prescale(c, cols);
  }
  fftw_plan plan = detail::PlanCache::instance().get(detail::Kind::dct3, static_cast<int>(rows),
                                                     static_cast<int>(cols));
  auto* buf = reinterpret_cast<double*>(u.data());
  fftw_execute_r2r(plan, buf, buf);
}

/// Moves the zero-frequency bin from (0,0) to (rows/2, cols/2).
template <Scalar T>
[[nodiscard]] Image<T> fftshift(const Image<T>& u) {
  Image<T> out(u.rows(), u.cols());
  const auto sr = u.rows() / 2;
  const auto sc = u.cols() / 2;
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const auto rr = (r + sr) % u.rows();
    for (std::size_t c = 0; c < u.cols(); ++c) out(rr, (c + sc) % u.cols()) = u(r, c);
  }
  return out;
}

/// Inverse of fftshift, also for odd sizes.
template <Scalar T>
[[nodiscard]] Image<T> ifftshift(const Image<T>& u) {
  Image<T> out(u.rows(), u.cols());
  const auto sr = u.rows() / 2;
  const auto sc = u.cols() / 2;
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const auto rr = (r + sr) % u.rows();
    for (std::size_t c = 0; c < u.cols(); ++c) out(r, c) = u(rr, (c + sc) % u.cols());
  }
  return out;
}

}  // namespace atvis::fft

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "atvis/fft.hpp"
#include "atvis/image.hpp"

namespace atvis {

/// Binary acquisition pattern over centered k-space: the DC bin sits at
/// (rows/2, cols/2).
class SamplingMask {
 public:
  SamplingMask() = default;
  SamplingMask(std::size_t rows, std::size_t cols, bool fill = false)
      : rows_(rows), cols_(cols), acquired_(rows * cols, fill ? 1 : 0) {}
  SamplingMask(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> acquired)
      : rows_(rows), cols_(cols), acquired_(std::move(acquired)) {
    if (acquired_.size() != rows_ * cols_) throw DimensionError("SamplingMask: size does not match rows*cols");
    for (auto& v : acquired_) v = v != 0 ? 1 : 0;
  }

  static SamplingMask full(std::size_t rows, std::size_t cols) { return {rows, cols, true}; }

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return acquired_.size(); }

  [[nodiscard]] bool operator()(std::size_t r, std::size_t c) const noexcept { return acquired_[r * cols_ + c] != 0; }
  [[nodiscard]] bool operator[](std::size_t i) const noexcept { return acquired_[i] != 0; }
  void set(std::size_t r, std::size_t c, bool v = true) noexcept { acquired_[r * cols_ + c] = v ? 1 : 0; }

  [[nodiscard]] std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto v : acquired_) n += v;
    return n;
  }
  [[nodiscard]] double density() const noexcept {
    return acquired_.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(acquired_.size());
  }
  [[nodiscard]] const std::vector<std::uint8_t>& bytes() const noexcept { return acquired_; }

  bool operator==(const SamplingMask&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> acquired_;
};

namespace detail {
inline void require_same(std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1, const char* what) {
  if (r0 != r1 || c0 != c1) throw DimensionError(std::string(what) + ": dimension mismatch");
}
}  // namespace detail

/// Centered, orthonormal, masked 2D DFT.
[[nodiscard]] inline ComplexImage fourier_undersample(const ComplexImage& u, const SamplingMask& mask) {
  detail::require_same(u.rows(), u.cols(), mask.rows(), mask.cols(), "fourier_undersample");
  ComplexImage k = u;
  fft::dft(k);
  k = fft::fftshift(k);
  for (std::size_t i = 0; i < k.size(); ++i)
    if (!mask[i]) k[i] = 0.0;
  return k;
}

[[nodiscard]] inline ComplexImage fourier_adjoint(const ComplexImage& k, const SamplingMask& mask) {
  detail::require_same(k.rows(), k.cols(), mask.rows(), mask.cols(), "fourier_adjoint");
  ComplexImage masked = k;
  for (std::size_t i = 0; i < masked.size(); ++i)
    if (!mask[i]) masked[i] = 0.0;
  ComplexImage u = fft::ifftshift(masked);
  fft::idft(u);
  return u;
}

/// Undersampled Fourier operator F_u with its adjoint.
struct FourierOperator {
  SamplingMask mask;

  [[nodiscard]] ComplexImage apply(const ComplexImage& u) const { return fourier_undersample(u, mask); }
  [[nodiscard]] ComplexImage adjoint(const ComplexImage& k) const { return fourier_adjoint(k, mask); }
};

enum class KernelKind { gaussian, motion, custom };

/// Square tap array of side 2*radius+1, centered on (radius, radius).
struct BlurKernel {
  RealImage taps;
  KernelKind kind = KernelKind::custom;

  [[nodiscard]] std::size_t radius() const noexcept { return taps.rows() / 2; }
};

namespace detail {
inline void normalize_taps(RealImage& taps) {
  double s = 0.0;
  for (double v : taps) s += v;
  if (!(s > 0.0)) throw InvalidArgument("blur kernel: taps sum to zero");
  taps *= 1.0 / s;
}
}  // namespace detail

[[nodiscard]] inline BlurKernel make_gaussian_kernel(int radius, double sigma_b) {
  if (radius < 1) throw InvalidArgument("gaussian kernel: radius must be >= 1");
  if (!(sigma_b > 0.0)) throw InvalidArgument("gaussian kernel: sigma_b must be > 0");
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  BlurKernel k{RealImage(side, side), KernelKind::gaussian};
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x)
      k.taps(static_cast<std::size_t>(y + radius), static_cast<std::size_t>(x + radius)) =
          std::exp(-(x * x + y * y) / (2.0 * sigma_b * sigma_b));
  detail::normalize_taps(k.taps);
  return k;
}

/// Line of `length` unit-spaced points through the center at `angle_deg`
/// (counter-clockwise from the column axis, rows pointing down), each point
/// splatted with bilinear weights.
[[nodiscard]] inline BlurKernel make_motion_kernel(int length, double angle_deg) {
  if (length < 2) throw InvalidArgument("motion kernel: length must be >= 2");
  const int radius = length / 2;
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  BlurKernel k{RealImage(side, side), KernelKind::motion};
  const double th = angle_deg * std::numbers::pi / 180.0;
  const double ux = std::cos(th);
  const double uy = -std::sin(th);
  auto splat = [&](double row, double col, double w) {
    if (w <= 0.0) return;
    const auto r = static_cast<long>(std::lround(row));
    const auto c = static_cast<long>(std::lround(col));
    if (r < 0 || c < 0 || r >= static_cast<long>(side) || c >= static_cast<long>(side)) return;
    k.taps(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) += w;
  };
  for (int j = 0; j < length; ++j) {
    const double t = -0.5 * (length - 1) + j;
    double x = radius + t * ux;
    double y = radius + t * uy;
    // Snap away roundoff so axis-aligned kernels stay exactly on the grid.
    if (std::abs(x - std::round(x)) < 1e-12) x = std::round(x);
    if (std::abs(y - std::round(y)) < 1e-12) y = std::round(y);
    const double x0 = std::floor(x);
    const double y0 = std::floor(y);
    const double fx = x - x0;
    const double fy = y - y0;
    splat(y0, x0, (1 - fy) * (1 - fx));
    splat(y0, x0 + 1, (1 - fy) * fx);
    splat(y0 + 1, x0, fy * (1 - fx));
    splat(y0 + 1, x0 + 1, fy * fx);
  }
  detail::normalize_taps(k.taps);
  return k;
}

/// Circular convolution with a normalized kernel, diagonalized by the DFT.
class BlurOperator {
 public:
  BlurOperator(const BlurKernel& kernel, std::size_t rows, std::size_t cols) : kernel_(kernel), transfer_(rows, cols) {
    const auto side = kernel.taps.rows();
    if (side > rows || side > cols) throw DimensionError("blur: kernel larger than image");
    const auto rad = static_cast<long>(kernel.radius());
    for (long i = -rad; i <= rad; ++i) {
      for (long j = -rad; j <= rad; ++j) {
        const auto r = static_cast<std::size_t>((i + static_cast<long>(rows)) % static_cast<long>(rows));
        const auto c = static_cast<std::size_t>((j + static_cast<long>(cols)) % static_cast<long>(cols));
        transfer_(r, c) += kernel.taps(static_cast<std::size_t>(i + rad), static_cast<std::size_t>(j + rad));
      }
    }
    fft::dft(transfer_);
    transfer_ *= cplx(std::sqrt(static_cast<double>(rows * cols)));
  }

  [[nodiscard]] ComplexImage apply(const ComplexImage& u) const { return filter(u, false); }
  [[nodiscard]] ComplexImage adjoint(const ComplexImage& u) const { return filter(u, true); }
  [[nodiscard]] const BlurKernel& kernel() const noexcept { return kernel_; }

 private:
  ComplexImage filter(const ComplexImage& u, bool conjugate) const {
    if (!u.same_shape(transfer_)) throw DimensionError("blur: dimension mismatch");
    ComplexImage v = u;
    fft::dft(v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= conjugate ? std::conj(transfer_[i]) : transfer_[i];
    fft::idft(v);
    return v;
  }

  BlurKernel kernel_;
  ComplexImage transfer_;
};

[[nodiscard]] inline ComplexImage blur_apply(const ComplexImage& u, const BlurKernel& h) {
  return BlurOperator(h, u.rows(), u.cols()).apply(u);
}
[[nodiscard]] inline ComplexImage blur_adjoint(const ComplexImage& u, const BlurKernel& h) {
  return BlurOperator(h, u.rows(), u.cols()).adjoint(u);
}

/// complex: independent N(0, sigma^2) on real and imaginary parts.
/// real: real part only (image-domain noise on a real image).
enum class NoiseKind { complex, real };

[[nodiscard]] inline ComplexImage add_noise(const ComplexImage& x, double sigma, std::uint64_t seed,
                                            NoiseKind kind = NoiseKind::complex) {
  if (!(sigma >= 0.0)) throw InvalidArgument("add_noise: sigma must be >= 0");
  if (sigma == 0.0) return x;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  ComplexImage out = x;
  for (auto& v : out) {
    const double re = g(rng);
    const double im = kind == NoiseKind::complex ? g(rng) : 0.0;
    v += cplx(re, im);
  }
  return out;
}

/// Complex noise on the acquired bins only; unacquired bins stay zero.
[[nodiscard]] inline ComplexImage add_kspace_noise(const ComplexImage& k, const SamplingMask& mask, double sigma,
                                                   std::uint64_t seed) {
  detail::require_same(k.rows(), k.cols(), mask.rows(), mask.cols(), "add_kspace_noise");
  ComplexImage out = add_noise(k, sigma, seed);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!mask[i]) out[i] = 0.0;
  return out;
}

/// Synthetic receive-coil sensitivities.
struct CoilSet {
  std::vector<ComplexImage> maps;

  [[nodiscard]] std::size_t size() const noexcept { return maps.size(); }
};

/// Gaussian-profile coils centered on a ring around the field of view, each
/// with a seeded constant phase and a gentle linear phase ramp.
[[nodiscard]] inline CoilSet synth_coils(int n_coils, std::size_t rows, std::size_t cols, std::uint64_t seed,
                                         bool flat = false) {
  if (n_coils < 1) throw InvalidArgument("synth_coils: need at least one coil");
  CoilSet set;
  if (flat) {
    set.maps.assign(static_cast<std::size_t>(n_coils), ComplexImage(rows, cols, cplx(1.0)));
    return set;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double pi = std::numbers::pi;
  const double cr = 0.5 * static_cast<double>(rows);
  const double cc = 0.5 * static_cast<double>(cols);
  const double ring = 0.6 * std::min(cr, cc);
  const double width = 0.7 * std::hypot(cr, cc);
  for (int c = 0; c < n_coils; ++c) {
    const double ang = 2.0 * pi * c / n_coils + 0.2 * (unit(rng) - 0.5);
    const double phase = 2.0 * pi * unit(rng);
    const double ramp_r = 0.5 * pi * (unit(rng) - 0.5) / static_cast<double>(rows);
    const double ramp_c = 0.5 * pi * (unit(rng) - 0.5) / static_cast<double>(cols);
    const double pr = n_coils == 1 ? cr : cr + ring * std::sin(ang);
    const double pc = n_coils == 1 ? cc : cc + ring * std::cos(ang);
    ComplexImage s(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t q = 0; q < cols; ++q) {
        const double dr = static_cast<double>(r) - pr;
        const double dc = static_cast<double>(q) - pc;
        const double mag = std::exp(-(dr * dr + dc * dc) / (2.0 * width * width));
        const double ph = phase + ramp_r * static_cast<double>(r) + ramp_c * static_cast<double>(q);
        s(r, q) = std::polar(mag, ph);
      }
    }
    set.maps.push_back(std::move(s));
  }
  return set;
}

}  // namespace atvis

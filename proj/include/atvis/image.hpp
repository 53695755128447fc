#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "atvis/errors.hpp"

namespace atvis {

using cplx = std::complex<double>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, cplx>;

/// Dense row-major 2D array. Rows index the first axis (n), columns the
/// second (m).
template <Scalar T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Image(std::size_t rows, std::size_t cols, std::vector<T> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("Image: value count does not match rows*cols");
    }
  }

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  [[nodiscard]] std::span<T> values() noexcept { return data_; }
  [[nodiscard]] std::span<const T> values() const noexcept { return data_; }
  [[nodiscard]] T* data() noexcept { return data_.data(); }
  [[nodiscard]] const T* data() const noexcept { return data_.data(); }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  [[nodiscard]] bool same_shape(const Image& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }
  template <Scalar U>
  [[nodiscard]] bool same_shape(const Image<U>& o) const noexcept {
    return rows_ == o.rows() && cols_ == o.cols();
  }

  Image& operator+=(const Image& o) {
    check_shape(o, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Image& operator-=(const Image& o) {
    check_shape(o, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Image& operator*=(T s) noexcept {
    for (auto& v : data_) v *= s;
    return *this;
  }
  Image& operator+=(T s) noexcept {
    for (auto& v : data_) v += s;
    return *this;
  }

  friend Image operator+(Image a, const Image& b) { return a += b; }
  friend Image operator-(Image a, const Image& b) { return a -= b; }
  friend Image operator*(Image a, T s) { return a *= s; }
  friend Image operator*(T s, Image a) { return a *= s; }

  bool operator==(const Image&) const = default;

 private:
  void check_shape(const Image& o, const char* what) const {
    if (!same_shape(o)) {
      throw DimensionError(std::string("Image::") + what + ": shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using ComplexImage = Image<cplx>;
using RealImage = Image<double>;

template <Scalar T>
[[nodiscard]] double squared_norm(const Image<T>& u) noexcept {
  double s = 0.0;
  for (const auto& v : u) s += std::norm(v);
  return s;
}

template <Scalar T>
[[nodiscard]] double l2_norm(const Image<T>& u) noexcept {
  return std::sqrt(squared_norm(u));
}

template <Scalar T>
[[nodiscard]] T mean(const Image<T>& u) noexcept {
  T s{};
  for (const auto& v : u) s += v;
  return u.empty() ? T{} : s / static_cast<double>(u.size());
}

template <Scalar T>
[[nodiscard]] bool all_finite(const Image<T>& u) noexcept {
  return std::all_of(u.begin(), u.end(), [](const T& v) {
    if constexpr (is_complex_v<T>) {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    } else {
      return std::isfinite(v);
    }
  });
}

/// Complex inner product sum(conj(a) * b).
template <Scalar T>
[[nodiscard]] cplx inner(const Image<T>& a, const Image<T>& b) {
  if (!a.same_shape(b)) throw DimensionError("inner: shape mismatch");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(cplx(a[i])) * cplx(b[i]);
  return s;
}

[[nodiscard]] inline ComplexImage to_complex(const RealImage& u) {
  ComplexImage out(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i];
  return out;
}

[[nodiscard]] inline RealImage real_part(const ComplexImage& u) {
  RealImage out(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i].real();
  return out;
}

[[nodiscard]] inline RealImage modulus(const ComplexImage& u) {
  RealImage out(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::abs(u[i]);
  return out;
}

/// Pair of equally sized planes holding first-axis (dx) and second-axis (dy)
/// differences, or any quantity living in derivative space.
template <Scalar T>
struct GradientField {
  Image<T> dx;
  Image<T> dy;

  GradientField() = default;
  GradientField(std::size_t rows, std::size_t cols) : dx(rows, cols), dy(rows, cols) {}
  GradientField(Image<T> x, Image<T> y) : dx(std::move(x)), dy(std::move(y)) {
    if (!dx.same_shape(dy)) throw DimensionError("GradientField: dx/dy shape mismatch");
  }

  [[nodiscard]] std::size_t rows() const noexcept { return dx.rows(); }
  [[nodiscard]] std::size_t cols() const noexcept { return dx.cols(); }
  /// Number of entries across both planes.
  [[nodiscard]] std::size_t count() const noexcept { return dx.size() + dy.size(); }

  [[nodiscard]] bool same_shape(const GradientField& o) const noexcept {
    return dx.same_shape(o.dx) && dy.same_shape(o.dy);
  }

  GradientField& operator+=(const GradientField& o) {
    dx += o.dx;
    dy += o.dy;
    return *this;
  }
  GradientField& operator-=(const GradientField& o) {
    dx -= o.dx;
    dy -= o.dy;
    return *this;
  }
  GradientField& operator*=(T s) noexcept {
    dx *= s;
    dy *= s;
    return *this;
  }
  friend GradientField operator+(GradientField a, const GradientField& b) { return a += b; }
  friend GradientField operator-(GradientField a, const GradientField& b) { return a -= b; }
  friend GradientField operator*(GradientField a, T s) { return a *= s; }
  friend GradientField operator*(T s, GradientField a) { return a *= s; }

  bool operator==(const GradientField&) const = default;
};

using ComplexField = GradientField<cplx>;
using RealField = GradientField<double>;

template <Scalar T>
[[nodiscard]] double l2_norm(const GradientField<T>& d) noexcept {
  return std::sqrt(squared_norm(d.dx) + squared_norm(d.dy));
}

template <Scalar T>
[[nodiscard]] cplx inner(const GradientField<T>& a, const GradientField<T>& b) {
  return inner(a.dx, b.dx) + inner(a.dy, b.dy);
}

template <Scalar T>
[[nodiscard]] bool all_finite(const GradientField<T>& d) noexcept {
  return all_finite(d.dx) && all_finite(d.dy);
}

}  // namespace atvis

#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "atvis/diffops.hpp"
#include "atvis/image.hpp"

namespace atvis {

/// Which real numbers feed the MAD estimate. real_and_imag concatenates both
/// parts of both planes; real_only uses the real parts, which is the only
/// meaningful choice when the data are real (the imaginary parts are pure
/// roundoff and would pin the median deviation near zero).
enum class SampleSet { real_and_imag, real_only };

enum class PhiKind { identity, log1p, one_minus_exp };

inline std::string_view to_string(PhiKind k) {
  switch (k) {
    case PhiKind::identity: return "id";
    case PhiKind::log1p: return "log1p";
    case PhiKind::one_minus_exp: return "one_minus_exp";
  }
  return "?";
}

inline constexpr double kMadScale = 1.4826;

/// Median with the even-length convention (mean of the two middle values).
[[nodiscard]] inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median: empty sample");
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

/// (1.4826 / sqrt 2) * median absolute deviation.
[[nodiscard]] inline double mad_sigma(const std::vector<double>& s) {
  const double med = median(s);
  std::vector<double> dev(s.size());
  std::transform(s.begin(), s.end(), dev.begin(), [med](double x) { return std::abs(x - med); });
  return kMadScale / std::sqrt(2.0) * median(std::move(dev));
}

[[nodiscard]] inline double estimate_sigma(const ComplexField& d, SampleSet set = SampleSet::real_and_imag) {
  if (d.count() == 0) throw InvalidArgument("estimate_sigma: empty field");
  std::vector<double> s;
  s.reserve(set == SampleSet::real_and_imag ? 2 * d.count() : d.count());
  for (const auto* plane : {&d.dx, &d.dy})
    for (const auto& v : *plane) s.push_back(v.real());
  if (set == SampleSet::real_and_imag)
    for (const auto* plane : {&d.dx, &d.dy})
      for (const auto& v : *plane) s.push_back(v.imag());
  return mad_sigma(s);
}

/// Universal threshold for the extreme value of P finite differences, with
/// P = N(M-1) + M(N-1).
[[nodiscard]] inline double initial_threshold(double sigma_hat, std::size_t n, std::size_t m) {
  if (!(sigma_hat >= 0.0)) throw InvalidArgument("initial_threshold: sigma_hat must be >= 0");
  if (n < 2 || m < 2) throw DimensionError("initial_threshold: image must be at least 2x2");
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double p_count = nn * (mm - 1.0) + mm * (nn - 1.0);
  const double p = 1.0 - 2.0 / std::sqrt(std::log(p_count));
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("initial_threshold: image too small for the universal threshold");
  const double ll = std::log(std::log(nn));
  const double mu = std::exp(-0.395 + 0.552 * ll);
  const double gamma = std::exp(-1.512 - 0.247 * ll);
  return sigma_hat * (mu - gamma * std::log(-std::log(p)));
}

/// eps_n = d_hat - d.
[[nodiscard]] inline ComplexField sparse_approx_error(const ComplexField& d_hat, const ComplexField& d) {
  if (!d_hat.same_shape(d)) throw DimensionError("sparse_approx_error: shape mismatch");
  return d_hat - d;
}

[[nodiscard]] inline double discrepancy(double tv_res, double tv_n) { return std::abs(tv_res - tv_n); }

[[nodiscard]] inline double discrepancy(const ComplexField& eps_res, const ComplexField& eps_n, TvMode mode) {
  if (!eps_res.same_shape(eps_n)) throw DimensionError("discrepancy: shape mismatch");
  return discrepancy(tv_norm(eps_res, mode), tv_norm(eps_n, mode));
}

[[nodiscard]] inline double phi(double d1, PhiKind kind, double c) {
  if (!(d1 >= 0.0)) throw InvalidArgument("phi: d1 must be >= 0");
  if (!(c > 0.0)) throw InvalidArgument("phi: scale must be > 0");
  switch (kind) {
    case PhiKind::identity: return c * d1;
    case PhiKind::log1p: return std::log1p(c * d1);
    case PhiKind::one_minus_exp: return -std::expm1(-c * d1);
  }
  return 0.0;
}

/// Mean modulus over both planes.
template <Scalar T>
[[nodiscard]] double expectation_abs(const GradientField<T>& d) {
  if (d.count() == 0) throw InvalidArgument("expectation_abs: empty field");
  double s = 0.0;
  for (const auto* plane : {&d.dx, &d.dy})
    for (const auto& v : *plane) s += std::abs(v);
  return s / static_cast<double>(d.count());
}

struct AdaptRecord {
  double d1 = 0.0;
  double e_res = 0.0;
  double e_n = 0.0;
  double beta = 0.0;  // threshold after the update
  bool zero_denominator = false;
};

struct AdaptState {
  double beta = 0.0;
  double beta0 = 0.0;
  double sigma_hat = 0.0;
  PhiKind phi_kind = PhiKind::identity;
  double phi_scale = 1.0;
  std::vector<AdaptRecord> history;

  AdaptState() = default;
  AdaptState(double beta_init, double sigma, PhiKind kind, double scale)
      : beta(beta_init), beta0(beta_init), sigma_hat(sigma), phi_kind(kind), phi_scale(scale) {
    if (!(beta_init >= 0.0)) throw InvalidArgument("AdaptState: beta must be >= 0");
    if (!(scale > 0.0)) throw InvalidArgument("AdaptState: phi scale must be > 0");
  }
};

/// beta <- E_res / (Phi(d1) + E_n / beta). A zero denominator keeps beta and
/// flags the record. Returns false in that case.
inline bool update_threshold(AdaptState& s, double e_res, double e_n, double d1) {
  if (!(e_res >= 0.0 && e_n >= 0.0 && d1 >= 0.0)) throw InvalidArgument("update_threshold: negative input");
  const double ph = phi(d1, s.phi_kind, s.phi_scale);
  const double ratio = s.beta > 0.0 ? e_n / s.beta : 0.0;
  const double den = ph + ratio;
  AdaptRecord rec{d1, e_res, e_n, s.beta, false};
  if (den > 0.0 && std::isfinite(den)) {
    s.beta = e_res / den;
    rec.beta = s.beta;
  } else {
    rec.zero_denominator = true;
  }
  s.history.push_back(rec);
  return !rec.zero_denominator;
}

}  // namespace atvis

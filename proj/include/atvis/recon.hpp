#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "atvis/adapt.hpp"
#include "atvis/diffops.hpp"
#include "atvis/forward.hpp"
#include "atvis/metrics.hpp"
#include "atvis/shrinkage.hpp"

namespace atvis {

enum class Algo { tvis, atvis };

inline std::string_view to_string(Algo a) { return a == Algo::tvis ? "tvis" : "atvis"; }

/// Default relative scale for Phi, see ReconConfig::phi_scale_relative.
inline constexpr double kDefaultPhiScale = 0.3;

struct ReconConfig {
  Algo algo = Algo::atvis;
  BoundaryCondition bc = BoundaryCondition::pbc;
  ShrinkMode shrink_mode = ShrinkMode::componentwise;
  TvMode tv_mode = TvMode::anisotropic;
  PhiKind phi_kind = PhiKind::identity;
  /// When phi_scale_relative is set, the effective scale is
  /// phi_scale / (2*N*M*beta0), which makes Phi(c*d1) compare the mean
  /// discrepancy per entry against the initial threshold. Otherwise
  /// phi_scale is used as c directly.
  double phi_scale = kDefaultPhiScale;
  bool phi_scale_relative = true;
  double tol = 1e-4;
  int max_iter = 200;
  double damping = 1.0;
  std::uint64_t seed = 0;
  std::optional<double> fixed_beta;
  SampleSet sample_set = SampleSet::real_and_imag;
  /// Width of the per-channel parallel map; 0 picks hardware concurrency.
  unsigned threads = 0;

  void validate() const {
    if (!(tol > 0.0)) throw InvalidArgument("ReconConfig: tol must be > 0");
    if (max_iter < 1) throw InvalidArgument("ReconConfig: max_iter must be >= 1");
    if (!(damping > 0.0)) throw InvalidArgument("ReconConfig: damping must be > 0");
    if (!(phi_scale > 0.0)) throw InvalidArgument("ReconConfig: phi_scale must be > 0");
    if (fixed_beta && !(*fixed_beta >= 0.0)) throw InvalidArgument("ReconConfig: fixed_beta must be >= 0");
  }
};

struct ReconReport {
  ComplexImage image;                  // single-channel estimate, or real SoS image
  std::vector<ComplexImage> channels;  // per-channel estimates
  std::vector<TraceRecord> trace;
  bool converged = false;
  int iterations = 0;
  double beta_initial = 0.0;
  double beta_final = 0.0;
  double sigma_hat = 0.0;
  double phi_scale_effective = 0.0;
  int zero_denominator_events = 0;
  /// Whether beta dropped below beta0 within the first five iterations.
  bool beta_decreased_early = false;
};

namespace detail {

inline unsigned resolve_threads(unsigned requested, std::size_t jobs) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(jobs, 1)));
}

/// Runs fn(i) for i in [0, jobs). Work is split by index, so each job's
/// result does not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t jobs, unsigned threads, Fn&& fn) {
  const unsigned t = resolve_threads(threads, jobs);
  if (t <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < jobs; i += t) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// A single channel passes through untouched; several channels are reduced
/// to the pixelwise root-sum-of-squares of their moduli.
inline ComplexField combine_fields(const std::vector<ComplexField>& fields) {
  if (fields.size() == 1) return fields.front();
  ComplexField out(fields.front().rows(), fields.front().cols());
  for (std::size_t i = 0; i < out.dx.size(); ++i) {
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& f : fields) {
      sx += std::norm(f.dx[i]);
      sy += std::norm(f.dy[i]);
    }
    out.dx[i] = std::sqrt(sx);
    out.dy[i] = std::sqrt(sy);
  }
  return out;
}

inline double relative_change(const ComplexImage& u, const ComplexImage& prev) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += std::norm(u[i] - prev[i]);
    den += std::norm(prev[i]);
  }
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

}  // namespace detail

/// Shared TVIS/ATVIS iteration over one or more channels that all use the
/// operator `op`. `data[c]` are the channel measurements and `dc[c]` the
/// mean image level restored after the zero-mean left inverse.
template <LinearOperator Op>
[[nodiscard]] ReconReport reconstruct(const std::vector<ComplexImage>& data, const Op& op,
                                      const std::vector<cplx>& dc, std::size_t rows, std::size_t cols,
                                      const ReconConfig& cfg, const ComplexImage* ref = nullptr) {
  cfg.validate();
  const std::size_t nc = data.size();
  if (nc == 0) throw InvalidArgument("reconstruct: no channels");
  if (dc.size() != nc) throw InvalidArgument("reconstruct: one DC level per channel required");
  if (ref != nullptr && (ref->rows() != rows || ref->cols() != cols))
    throw DimensionError("reconstruct: reference shape mismatch");

  const auto t_start = std::chrono::steady_clock::now();
  const IntegrationFilter w = integration_filter(rows, cols, cfg.bc);

  std::vector<FistaState> fista(nc, FistaState(rows, cols));
  std::vector<ComplexField> eps_res(nc), d_hat(nc), eps_n(nc);
  std::vector<ComplexImage> u(nc), u_prev(nc);
  for (std::size_t c = 0; c < nc; ++c) u_prev[c] = ComplexImage(rows, cols, dc[c]);

  auto combined_image = [&](const std::vector<ComplexImage>& imgs) {
    return nc == 1 ? imgs.front() : sos_combine(imgs);
  };
  ComplexImage image_prev = combined_image(u_prev);

  ReconReport rep;
  AdaptState adapt;
  ComplexField eps_n_lag(rows, cols);  // combined eps_n from the previous iteration

  for (int k = 1; k <= cfg.max_iter; ++k) {
    detail::parallel_for(nc, cfg.threads, [&](std::size_t c) {
      eps_res[c] = landweber_residual(fista[c].d_relaxed, data[c], op, w, cfg.damping);
      d_hat[c] = fista[c].d_relaxed + eps_res[c];
    });

    if (k == 1) {
      const SampleSet set = nc == 1 ? cfg.sample_set : SampleSet::real_only;
      const double sigma = estimate_sigma(detail::combine_fields(d_hat), set);
      const double beta0 = cfg.fixed_beta ? *cfg.fixed_beta : initial_threshold(sigma, rows, cols);
      double c_eff = cfg.phi_scale;
      if (cfg.phi_scale_relative && beta0 > 0.0)
        c_eff = cfg.phi_scale / (2.0 * static_cast<double>(rows * cols) * beta0);
      adapt = AdaptState(beta0, sigma, cfg.phi_kind, c_eff);
      rep.sigma_hat = sigma;
      rep.beta_initial = beta0;
      rep.phi_scale_effective = c_eff;
    }
    const double beta_used = adapt.beta;

    detail::parallel_for(nc, cfg.threads, [&](std::size_t c) {
      ComplexField d = soft_threshold(d_hat[c], beta_used, cfg.shrink_mode);
      eps_n[c] = sparse_approx_error(d_hat[c], d);
      u[c] = left_inverse(d, w);
      u[c] += dc[c];
      fista_step(fista[c], d);
    });

    ComplexImage image = combined_image(u);
    if (!all_finite(image)) {
      throw NumericalError("reconstruct: non-finite iterate at iteration " + std::to_string(k));
    }

    const ComplexField res_comb = detail::combine_fields(eps_res);
    const double e_res = expectation_abs(res_comb);
    const double e_n = expectation_abs(eps_n_lag);
    const double d1 = discrepancy(tv_norm(res_comb, cfg.tv_mode), tv_norm(eps_n_lag, cfg.tv_mode));

    TraceRecord rec;
    rec.iter = k;
    rec.beta = beta_used;
    rec.l1_eps_res = tv_norm(res_comb, TvMode::anisotropic);
    rec.l1_eps_n = tv_norm(eps_n_lag, TvMode::anisotropic);
    rec.d1 = d1;
    if (ref != nullptr) rec.rlne = rlne(image, *ref);

    if (cfg.algo == Algo::atvis) {
      if (!update_threshold(adapt, e_res, e_n, d1)) {
        rec.zero_denominator = true;
        ++rep.zero_denominator_events;
      }
      if (k <= 5 && adapt.beta < adapt.beta0) rep.beta_decreased_early = true;
    }
    eps_n_lag = detail::combine_fields(eps_n);

    const double change = detail::relative_change(image, image_prev);
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    rep.trace.push_back(rec);
    image_prev = std::move(image);
    rep.iterations = k;
    if (change <= cfg.tol) {
      rep.converged = true;
      break;
    }
  }

  rep.image = std::move(image_prev);
  rep.channels = std::move(u);
  rep.beta_final = rep.trace.back().beta;
  return rep;
}

/// Mean image level implied by the DC bin of centered k-space.
[[nodiscard]] inline cplx kspace_dc_level(const ComplexImage& k, const SamplingMask& mask) {
  const std::size_t r = k.rows() / 2;
  const std::size_t c = k.cols() / 2;
  if (!mask(r, c)) return {};
  return k(r, c) / std::sqrt(static_cast<double>(k.size()));
}

/// Single-channel compressed sensing from centered k-space.
[[nodiscard]] inline ReconReport run_cs(const ComplexImage& k_data, const SamplingMask& mask, const ReconConfig& cfg,
                                        const ComplexImage* ref = nullptr) {
  detail::require_same(k_data.rows(), k_data.cols(), mask.rows(), mask.cols(), "run_cs");
  const FourierOperator op{mask};
  return reconstruct({k_data}, op, {kspace_dc_level(k_data, mask)}, k_data.rows(), k_data.cols(), cfg, ref);
}

/// Channel-by-channel compressed sensing with a shared threshold; the
/// report image is the SoS combination.
[[nodiscard]] inline ReconReport run_cs_multi(const std::vector<ComplexImage>& k_data, const SamplingMask& mask,
                                              const ReconConfig& cfg, const ComplexImage* ref = nullptr) {
  if (k_data.empty()) throw InvalidArgument("run_cs_multi: no channels");
  std::vector<cplx> dc;
  for (const auto& k : k_data) {
    detail::require_same(k.rows(), k.cols(), mask.rows(), mask.cols(), "run_cs_multi");
    dc.push_back(kspace_dc_level(k, mask));
  }
  const FourierOperator op{mask};
  return reconstruct(k_data, op, dc, mask.rows(), mask.cols(), cfg, ref);
}

/// Deblurring of a circularly blurred image.
[[nodiscard]] inline ReconReport run_restore(const ComplexImage& blurred, const BlurKernel& kernel,
                                             const ReconConfig& cfg, const ComplexImage* ref = nullptr) {
  const BlurOperator op(kernel, blurred.rows(), blurred.cols());
  return reconstruct({blurred}, op, {mean(blurred)}, blurred.rows(), blurred.cols(), cfg, ref);
}

[[nodiscard]] inline ReconReport run_tvis(const ComplexImage& k_data, const SamplingMask& mask, ReconConfig cfg,
                                          const ComplexImage* ref = nullptr) {
  cfg.algo = Algo::tvis;
  return run_cs(k_data, mask, cfg, ref);
}

[[nodiscard]] inline ReconReport run_atvis(const ComplexImage& k_data, const SamplingMask& mask, ReconConfig cfg,
                                           const ComplexImage* ref = nullptr) {
  cfg.algo = Algo::atvis;
  return run_cs(k_data, mask, cfg, ref);
}

}  // namespace atvis

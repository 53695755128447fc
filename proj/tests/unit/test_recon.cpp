#include <gtest/gtest.h>

#include <atvis/masks.hpp>
#include <atvis/recon.hpp>

#include <limits>

#include "test_util.hpp"

using namespace atvis;

namespace {

struct CsCase {
  ComplexImage truth;
  SamplingMask mask;
  ComplexImage k;
};

CsCase vd_case(std::size_t n, double noise, std::uint64_t seed) {
  CsCase c{geometric_phantom(n, seed), variable_density_mask(n, n, 0.35, 0.02, seed + 100), {}};
  c.k = add_kspace_noise(fourier_undersample(c.truth, c.mask), c.mask, noise, seed + 200);
  return c;
}

}  // namespace

TEST(ReconConfig, Validation) {
  ReconConfig c;
  EXPECT_NO_THROW(c.validate());
  c.tol = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.max_iter = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.damping = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.fixed_beta = -0.1;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Recon, FullySampledNoiseFreeTvis) {
  const auto truth = shepp_logan(64);
  const auto mask = SamplingMask::full(64, 64);
  ReconConfig cfg;
  cfg.max_iter = 50;
  const auto rep = run_tvis(fourier_undersample(truth, mask), mask, cfg, &truth);
  EXPECT_LE(rep.trace.back().rlne, 1e-3);
  EXPECT_LE(rep.iterations, 50);
}

TEST(Recon, ZeroMeasurementsConvergeImmediately) {
  const auto mask = variable_density_mask(32, 32, 0.3, 0.05, 1);
  for (Algo a : {Algo::tvis, Algo::atvis}) {
    ReconConfig cfg;
    cfg.algo = a;
    const auto rep = run_cs(ComplexImage(32, 32), mask, cfg);
    EXPECT_TRUE(rep.converged);
    EXPECT_EQ(rep.iterations, 1);
    EXPECT_EQ(l2_norm(rep.image), 0.0);
    if (a == Algo::atvis) {
      EXPECT_EQ(rep.zero_denominator_events, 1);
    }
  }
}

TEST(Recon, NonConvergenceIsReported) {
  const auto c = vd_case(64, 0.0, 3);
  ReconConfig cfg;
  cfg.max_iter = 2;
  const auto rep = run_cs(c.k, c.mask, cfg, &c.truth);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations, 2);
  EXPECT_EQ(rep.trace.size(), 2u);
}

TEST(Recon, TraceInvariants) {
  const auto c = vd_case(64, 1e-3, 4);
  ReconConfig cfg;
  cfg.algo = Algo::tvis;
  const auto tv = run_cs(c.k, c.mask, cfg, &c.truth);
  for (const auto& t : tv.trace) EXPECT_EQ(t.beta, tv.beta_initial);
  cfg.algo = Algo::atvis;
  const auto at = run_cs(c.k, c.mask, cfg, &c.truth);
  EXPECT_EQ(at.trace.front().beta, at.beta_initial);
  EXPECT_EQ(at.beta_final, at.trace.back().beta);
  EXPECT_EQ(at.beta_initial, tv.beta_initial);
  EXPECT_EQ(static_cast<int>(at.trace.size()), at.iterations);
  for (std::size_t i = 0; i < at.trace.size(); ++i) {
    const auto& t = at.trace[i];
    EXPECT_EQ(t.iter, static_cast<int>(i) + 1);
    for (double v : {t.beta, t.rlne, t.l1_eps_res, t.l1_eps_n, t.d1, t.elapsed_ms}) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Recon, AtvisNoWorseThanTvisNoiseFree) {
  const auto c = vd_case(64, 0.0, 5);
  ReconConfig cfg;
  const auto at = run_atvis(c.k, c.mask, cfg, &c.truth);
  const auto tv = run_tvis(c.k, c.mask, cfg, &c.truth);
  EXPECT_LE(at.trace.back().rlne, tv.trace.back().rlne);
}

TEST(Recon, FixedBetaOverridesEstimate) {
  const auto c = vd_case(32, 0.0, 6);
  ReconConfig cfg;
  cfg.fixed_beta = 0.0123;
  cfg.max_iter = 3;
  const auto rep = run_tvis(c.k, c.mask, cfg);
  for (const auto& t : rep.trace) EXPECT_EQ(t.beta, 0.0123);
}

TEST(Recon, DcPreservedWithFullMask) {
  auto truth = shepp_logan(32);
  truth += cplx(0.25, -0.1);
  const auto mask = SamplingMask::full(32, 32);
  const auto k = fourier_undersample(truth, mask);
  ReconConfig cfg;
  cfg.max_iter = 5;
  const auto rep = run_cs(k, mask, cfg);
  EXPECT_LT(std::abs(mean(rep.image) - k(16, 16) / 32.0), 1e-10);
}

TEST(Recon, NonFiniteDataAborts) {
  const auto mask = SamplingMask::full(16, 16);
  ComplexImage k(16, 16);
  k(3, 3) = std::numeric_limits<double>::quiet_NaN();
  ReconConfig cfg;
  cfg.fixed_beta = 0.1;
  EXPECT_THROW((void)run_cs(k, mask, cfg), NumericalError);
}

TEST(Recon, SymmetricBoundaryRuns) {
  const auto c = vd_case(64, 0.0, 7);
  ReconConfig cfg;
  cfg.bc = BoundaryCondition::sbc;
  const auto rep = run_cs(c.k, c.mask, cfg, &c.truth);
  EXPECT_LT(rep.trace.back().rlne, 0.2);
}

TEST(Recon, FlatSingleCoilMatchesSingleChannel) {
  const auto c = vd_case(64, 1e-3, 8);
  const auto coils = synth_coils(1, 64, 64, 0, true);
  ComplexImage coil_img = c.truth;
  for (std::size_t i = 0; i < coil_img.size(); ++i) coil_img[i] *= coils.maps[0][i];
  const auto k1 = add_kspace_noise(fourier_undersample(coil_img, c.mask), c.mask, 1e-3, 208);
  ASSERT_EQ(k1, c.k);
  ReconConfig cfg;
  const auto single = run_cs(c.k, c.mask, cfg, &c.truth);
  const auto multi = run_cs_multi({k1}, c.mask, cfg, &c.truth);
  ASSERT_EQ(single.trace.size(), multi.trace.size());
  for (std::size_t i = 0; i < single.trace.size(); ++i) {
    EXPECT_NEAR(single.trace[i].beta, multi.trace[i].beta, 1e-12);
    EXPECT_NEAR(single.trace[i].rlne, multi.trace[i].rlne, 1e-12);
    EXPECT_NEAR(single.trace[i].d1, multi.trace[i].d1, 1e-12);
  }
}

TEST(Recon, SerialAndParallelChannelsAgreeBitwise) {
  const std::size_t n = 64;
  const auto truth = geometric_phantom(n, 9);
  const auto mask = radial_mask(n, n, 24, SpokeSpacing::golden);
  const auto coils = synth_coils(4, n, n, 2);
  std::vector<ComplexImage> k;
  for (int c = 0; c < 4; ++c) {
    ComplexImage img = truth;
    for (std::size_t i = 0; i < img.size(); ++i) img[i] *= coils.maps[std::size_t(c)][i];
    k.push_back(add_kspace_noise(fourier_undersample(img, mask), mask, 1e-3, 50 + std::uint64_t(c)));
  }
  ReconConfig cfg;
  cfg.max_iter = 15;
  cfg.threads = 1;
  const auto serial = run_cs_multi(k, mask, cfg);
  cfg.threads = 4;
  const auto parallel = run_cs_multi(k, mask, cfg);
  EXPECT_EQ(serial.image, parallel.image);
  ASSERT_EQ(serial.trace.size(), parallel.trace.size());
  for (std::size_t i = 0; i < serial.trace.size(); ++i) EXPECT_EQ(serial.trace[i].beta, parallel.trace[i].beta);
  for (const auto& v : serial.image) EXPECT_EQ(v.imag(), 0.0);
}

TEST(Restore, IdentityKernelNoNoise) {
  const auto truth = shepp_logan(64);
  BlurKernel id{RealImage(3, 3), KernelKind::custom};
  id.taps(1, 1) = 1.0;
  ReconConfig cfg;
  cfg.max_iter = 50;
  cfg.sample_set = SampleSet::real_only;
  const auto rep = run_restore(blur_apply(truth, id), id, cfg, &truth);
  EXPECT_LE(rep.trace.back().rlne, 1e-3);
}

TEST(Restore, ImprovesOnTheBlurredInput) {
  const auto truth = shepp_logan(64);
  const auto h = make_gaussian_kernel(1, 0.5);
  const auto y = add_noise(blur_apply(truth, h), 1e-3, 1, NoiseKind::real);
  ReconConfig cfg;
  cfg.sample_set = SampleSet::real_only;
  for (Algo a : {Algo::tvis, Algo::atvis}) {
    cfg.algo = a;
    const auto rep = run_restore(y, h, cfg, &truth);
    EXPECT_LT(rep.trace.back().rlne, rlne(y, truth));
  }
}

// atvis: mask generation, measurement simulation, reconstruction, evaluation
// and export on CSM1 files.

#include <CLI11.hpp>

#include <atvis/atvis.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace atvis;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitNumerical = 4;

struct Size {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

Size parse_size(const std::string& s) {
  const auto x = s.find_first_of("xX");
  try {
    if (x == std::string::npos) {
      const auto n = static_cast<std::size_t>(std::stoul(s));
      return {n, n};
    }
    return {static_cast<std::size_t>(std::stoul(s.substr(0, x))), static_cast<std::size_t>(std::stoul(s.substr(x + 1)))};
  } catch (const std::exception&) {
    throw InvalidArgument("bad size '" + s + "', expected N or NxM");
  }
}

std::string num(double v) { return io::format_number(v); }

/// Reads `key = value` lines into `--key=value` tokens. Blank lines and
/// lines starting with '#' are skipped.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config " + path);
  std::vector<std::string> out;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  for (std::string line; std::getline(f, line);) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    out.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return out;
}

/// Splices config-file tokens in right after the subcommand so that flags
/// given on the command line, which come later, take precedence.
std::vector<std::string> expand_args(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::optional<std::string> config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (!config || args.size() < 2) return args;
  auto extra = config_tokens(*config);
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

// ---------------------------------------------------------------- mask

struct MaskArgs {
  std::string type;
  std::string size = "256x256";
  double frac = 0.30;
  double central_frac = 0.0155;
  int spokes = 80;
  std::string spacing = "golden";
  int lines = 120;
  int central_lines = 32;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_mask(const MaskArgs& a) {
  const Size sz = parse_size(a.size);
  SamplingMask m;
  io::Metadata meta{{"type", a.type}, {"size", std::to_string(sz.rows) + "x" + std::to_string(sz.cols)}};
  if (a.type == "vd") {
    m = variable_density_mask(sz.rows, sz.cols, a.frac, a.central_frac, a.seed);
    const auto side = vd_core_side(sz.rows, sz.cols, a.central_frac);
    meta.insert(meta.end(), {{"frac", num(a.frac)},
                             {"central_frac", num(a.central_frac)},
                             {"core", "centered square " + std::to_string(side) + "x" + std::to_string(side)},
                             {"density_law", "(1+r/rmax)^-" + num(kVdExponent)},
                             {"seed", std::to_string(a.seed)}});
  } else if (a.type == "radial") {
    const auto spacing = a.spacing == "uniform" ? SpokeSpacing::uniform : SpokeSpacing::golden;
    if (a.spacing != "uniform" && a.spacing != "golden") throw InvalidArgument("--spacing must be golden or uniform");
    m = radial_mask(sz.rows, sz.cols, a.spokes, spacing);
    meta.insert(meta.end(), {{"spokes", std::to_string(a.spokes)}, {"spacing", a.spacing}});
  } else if (a.type == "pe") {
    m = phase_encode_mask(sz.rows, sz.cols, a.lines, a.central_lines, a.seed);
    meta.insert(meta.end(), {{"lines", std::to_string(a.lines)},
                             {"central_lines", std::to_string(a.central_lines)},
                             {"seed", std::to_string(a.seed)}});
  } else {
    throw InvalidArgument("--type must be vd, radial or pe");
  }
  meta.emplace_back("density", num(m.density()));
  io::write_mask(a.out, m, meta);
  std::printf("density=%.6f acquired=%zu\n", m.density(), m.count());
  return kExitOk;
}

// ---------------------------------------------------------------- kernels

struct KernelArgs {
  std::string kind = "gaussian";
  int radius = 4;
  double sigma_b = 2.0;
  int length = 9;
  double angle = 30.0;
};

BlurKernel make_kernel(const KernelArgs& k) {
  if (k.kind == "gaussian") return make_gaussian_kernel(k.radius, k.sigma_b);
  if (k.kind == "motion") return make_motion_kernel(k.length, k.angle);
  throw InvalidArgument("--kernel must be gaussian or motion");
}

io::Metadata kernel_meta(const KernelArgs& k) {
  return {{"kernel", k.kind},
          {"radius", std::to_string(k.radius)},
          {"sigma_b", num(k.sigma_b)},
          {"length", std::to_string(k.length)},
          {"angle", num(k.angle)}};
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
  std::string mode = "cs";
  std::string phantom = "shepp";
  std::string input;
  std::string size = "256";
  std::string mask;
  int coils = 1;
  std::uint64_t coil_seed = 11;
  std::uint64_t phantom_seed = 3;
  double noise = 0.0;
  std::string noise_domain;
  std::uint64_t seed = 0;
  KernelArgs kernel;
  std::string out;
  std::string ref_out;
};

std::string default_ref_path(const std::string& out) {
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + ".ref.csm";
  return out.substr(0, dot) + ".ref" + out.substr(dot);
}

int cmd_simulate(const SimArgs& a) {
  ComplexImage truth;
  if (!a.input.empty()) {
    truth = io::read_image(a.input);
  } else {
    const Size sz = parse_size(a.size);
    if (sz.rows != sz.cols) throw InvalidArgument("phantoms are square; use --size N");
    if (a.phantom == "shepp") truth = shepp_logan(sz.rows);
    else if (a.phantom == "geo") truth = geometric_phantom(sz.rows, a.phantom_seed);
    else throw InvalidArgument("--phantom must be shepp or geo");
  }
  io::Metadata meta{{"mode", a.mode}, {"noise", num(a.noise)}, {"seed", std::to_string(a.seed)}};
  if (a.input.empty()) {
    meta.emplace_back("phantom", a.phantom);
    if (a.phantom == "geo") meta.emplace_back("phantom_seed", std::to_string(a.phantom_seed));
  }
  const std::string ref_path = a.ref_out.empty() ? default_ref_path(a.out) : a.ref_out;

  if (a.mode == "deblur") {
    const std::string domain = a.noise_domain.empty() ? "image" : a.noise_domain;
    if (domain != "image") throw InvalidArgument("deblur noise is image-domain only");
    const BlurKernel h = make_kernel(a.kernel);
    const bool real_input = std::all_of(truth.begin(), truth.end(), [](const cplx& v) { return v.imag() == 0.0; });
    ComplexImage y = add_noise(blur_apply(truth, h), a.noise, a.seed, real_input ? NoiseKind::real : NoiseKind::complex);
    for (auto& kv : kernel_meta(a.kernel)) meta.push_back(kv);
    meta.emplace_back("noise_domain", domain);
    io::write_image(a.out, y, meta);
    io::write_image(ref_path, truth);
    return kExitOk;
  }
  if (a.mode != "cs") throw InvalidArgument("--mode must be cs or deblur");
  if (a.mask.empty()) throw InvalidArgument("--mask is required for cs simulation");
  const SamplingMask mask = io::read_mask(a.mask);
  if (mask.rows() != truth.rows() || mask.cols() != truth.cols()) throw DimensionError("mask and image sizes differ");
  const std::string domain = a.noise_domain.empty() ? "kspace" : a.noise_domain;
  if (domain != "kspace" && domain != "image") throw InvalidArgument("--noise-domain must be kspace or image");
  if (a.coils < 1) throw InvalidArgument("--coils must be >= 1");

  const CoilSet coils = synth_coils(a.coils, truth.rows(), truth.cols(), a.coil_seed, a.coils == 1);
  std::vector<ComplexImage> kdata;
  std::vector<ComplexImage> coil_images;
  for (int c = 0; c < a.coils; ++c) {
    ComplexImage img = truth;
    for (std::size_t i = 0; i < img.size(); ++i) img[i] *= coils.maps[static_cast<std::size_t>(c)][i];
    const std::uint64_t s = a.seed + static_cast<std::uint64_t>(c);
    ComplexImage k = domain == "image" ? fourier_undersample(add_noise(img, a.noise, s), mask)
                                       : add_kspace_noise(fourier_undersample(img, mask), mask, a.noise, s);
    kdata.push_back(std::move(k));
    coil_images.push_back(std::move(img));
  }
  meta.insert(meta.end(), {{"coils", std::to_string(a.coils)}, {"noise_domain", domain}, {"mask", a.mask}});
  if (a.coils == 1) {
    io::write_image(a.out, kdata.front(), meta);
    io::write_image(ref_path, truth);
  } else {
    meta.emplace_back("coil_seed", std::to_string(a.coil_seed));
    io::write_stack(a.out, kdata, meta);
    io::write_image(ref_path, sos_combine(coil_images));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- recon

struct ReconArgs {
  std::string input;
  std::string mask;
  std::string mode;
  std::string algo = "atvis";
  std::string phi = "id";
  double phi_scale = kDefaultPhiScale;
  bool phi_scale_absolute = false;
  double tol = 1e-4;
  int max_iter = 200;
  double damping = 1.0;
  std::string bc = "pbc";
  std::string shrink = "componentwise";
  std::string tv = "anisotropic";
  std::string samples;
  std::optional<double> beta;
  std::optional<unsigned> threads;
  std::string ref;
  std::string out = "recon.csm";
  std::string trace;
  std::string config;
  KernelArgs kernel;
  CLI::App* app = nullptr;
};

template <class E>
E pick(const std::string& value, std::initializer_list<std::pair<const char*, E>> table, const char* flag) {
  for (const auto& [name, e] : table)
    if (value == name) return e;
  throw InvalidArgument(std::string("invalid value '") + value + "' for " + flag);
}

int cmd_recon(const ReconArgs& a) {
  const io::MatrixFile input = io::read_matrix(a.input);
  const std::vector<ComplexImage> data = io::to_planes(input);
  const std::string mode = a.mode.empty() ? input.meta("mode", "cs") : a.mode;

  ReconConfig cfg;
  cfg.algo = pick<Algo>(a.algo, {{"tvis", Algo::tvis}, {"atvis", Algo::atvis}}, "--algo");
  cfg.phi_kind = pick<PhiKind>(a.phi,
                               {{"id", PhiKind::identity},
                                {"identity", PhiKind::identity},
                                {"log1p", PhiKind::log1p},
                                {"log", PhiKind::log1p},
                                {"exp", PhiKind::one_minus_exp},
                                {"one_minus_exp", PhiKind::one_minus_exp}},
                               "--phi");
  cfg.phi_scale = a.phi_scale;
  cfg.phi_scale_relative = !a.phi_scale_absolute;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.damping = a.damping;
  cfg.bc = pick<BoundaryCondition>(a.bc, {{"pbc", BoundaryCondition::pbc}, {"sbc", BoundaryCondition::sbc}}, "--bc");
  cfg.shrink_mode =
      pick<ShrinkMode>(a.shrink, {{"componentwise", ShrinkMode::componentwise}, {"vector", ShrinkMode::vector}}, "--shrink");
  cfg.tv_mode = pick<TvMode>(a.tv,
                             {{"anisotropic", TvMode::anisotropic},
                              {"aniso", TvMode::anisotropic},
                              {"isotropic", TvMode::isotropic},
                              {"iso", TvMode::isotropic}},
                             "--tv");
  cfg.fixed_beta = a.beta;
  if (a.threads) {
    cfg.threads = *a.threads;
  } else if (const char* env = std::getenv("ATVIS_THREADS"); env != nullptr && *env != '\0') {
    try {
      cfg.threads = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw InvalidArgument("ATVIS_THREADS must be a non-negative integer");
    }
  }

  std::optional<ComplexImage> ref;
  if (!a.ref.empty()) ref = io::read_image(a.ref);
  const ComplexImage* ref_ptr = ref ? &*ref : nullptr;

  ReconReport rep;
  io::Metadata params{{"mode", mode},          {"algo", a.algo},
                      {"phi", a.phi},          {"phi_scale", num(a.phi_scale)},
                      {"phi_scale_relative", cfg.phi_scale_relative ? "true" : "false"},
                      {"tol", num(a.tol)},     {"max_iter", std::to_string(a.max_iter)},
                      {"damping", num(a.damping)}, {"bc", a.bc},
                      {"shrink", a.shrink},    {"tv", a.tv},
                      {"input", a.input}};
  if (mode == "deblur") {
    // Kernel flags fall back to the values recorded by `simulate`.
    KernelArgs k = a.kernel;
    auto from_meta = [&](const char* flag, const char* key, auto& field, auto parse) {
      if (a.app->count(flag) == 0 && !input.meta(key).empty()) field = parse(input.meta(key));
    };
    from_meta("--kernel", "kernel", k.kind, [](const std::string& s) { return s; });
    from_meta("--radius", "radius", k.radius, [](const std::string& s) { return std::stoi(s); });
    from_meta("--sigma-b", "sigma_b", k.sigma_b, [](const std::string& s) { return std::stod(s); });
    from_meta("--length", "length", k.length, [](const std::string& s) { return std::stoi(s); });
    from_meta("--angle", "angle", k.angle, [](const std::string& s) { return std::stod(s); });
    if (data.size() != 1) throw InvalidArgument("deblur expects a single 2D image");
    cfg.sample_set = a.samples.empty() ? SampleSet::real_only : SampleSet::real_and_imag;
    if (!a.samples.empty())
      cfg.sample_set = pick<SampleSet>(a.samples, {{"real", SampleSet::real_only}, {"complex", SampleSet::real_and_imag}}, "--samples");
    for (auto& kv : kernel_meta(k)) params.push_back(kv);
    rep = run_restore(data.front(), make_kernel(k), cfg, ref_ptr);
  } else if (mode == "cs") {
    if (a.mask.empty()) throw InvalidArgument("--mask is required for cs reconstruction");
    if (!a.samples.empty())
      cfg.sample_set = pick<SampleSet>(a.samples, {{"real", SampleSet::real_only}, {"complex", SampleSet::real_and_imag}}, "--samples");
    const SamplingMask mask = io::read_mask(a.mask);
    params.emplace_back("mask", a.mask);
    params.emplace_back("channels", std::to_string(data.size()));
    rep = data.size() == 1 ? run_cs(data.front(), mask, cfg, ref_ptr) : run_cs_multi(data, mask, cfg, ref_ptr);
  } else {
    throw InvalidArgument("--mode must be cs or deblur");
  }

  params.emplace_back("sigma_hat", num(rep.sigma_hat));
  params.emplace_back("beta_initial", num(rep.beta_initial));
  params.emplace_back("beta_final", num(rep.beta_final));
  params.emplace_back("phi_scale_effective", num(rep.phi_scale_effective));
  params.emplace_back("iterations", std::to_string(rep.iterations));
  params.emplace_back("converged", rep.converged ? "true" : "false");
  io::write_image(a.out, rep.image, params);
  if (!a.trace.empty()) {
    std::ofstream f(a.trace, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + a.trace);
    io::write_trace_csv(f, rep.trace, ref_ptr != nullptr, params);
  }
  std::printf("iterations=%d converged=%s beta0=%s betaf=%s", rep.iterations, rep.converged ? "true" : "false",
              num(rep.beta_initial).c_str(), num(rep.beta_final).c_str());
  if (ref_ptr != nullptr) std::printf(" rlne=%.6f", rep.trace.back().rlne);
  std::printf("\n");
  return rep.converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------- eval/export

int cmd_eval(const std::string& input, const std::string& ref) {
  std::printf("%.6f\n", rlne(io::read_image(input), io::read_image(ref)));
  return kExitOk;
}

int cmd_export(const std::string& input, const std::string& out, const std::string& diff) {
  ComplexImage u = io::read_image(input);
  if (!diff.empty()) {
    const ComplexImage r = io::read_image(diff);
    if (!u.same_shape(r)) throw DimensionError("export: --diff image has a different size");
    u -= r;
  }
  io::write_pgm(out, modulus(u));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Total-variation iterative shrinkage with adaptive thresholds"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", "atvis 1.0.0");

  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value file; command-line flags override it");
  };

  MaskArgs mask_args;
  auto* mask = app.add_subcommand("mask", "Generate a k-space sampling mask");
  mask->add_option("--type", mask_args.type, "vd | radial | pe")->required();
  mask->add_option("--size", mask_args.size, "N or NxM");
  mask->add_option("--frac", mask_args.frac, "Acquired fraction (vd)");
  mask->add_option("--central-frac", mask_args.central_frac, "Fully sampled core fraction (vd)");
  mask->add_option("--spokes", mask_args.spokes, "Spoke count (radial)");
  mask->add_option("--spacing", mask_args.spacing, "golden | uniform (radial)");
  mask->add_option("--lines", mask_args.lines, "Phase-encode lines (pe)");
  mask->add_option("--central-lines", mask_args.central_lines, "Central lines (pe)");
  mask->add_option("--seed", mask_args.seed, "RNG seed");
  mask->add_option("-o,--out", mask_args.out, "Output CSM1 file")->required();
  add_config(mask);

  SimArgs sim;
  auto add_kernel = [](CLI::App* sub, KernelArgs& k) {
    sub->add_option("--kernel", k.kind, "gaussian | motion");
    sub->add_option("--radius", k.radius, "Gaussian kernel radius");
    sub->add_option("--sigma-b", k.sigma_b, "Gaussian kernel width");
    sub->add_option("--length", k.length, "Motion kernel length");
    sub->add_option("--angle", k.angle, "Motion kernel angle in degrees");
  };
  auto* simulate = app.add_subcommand("simulate", "Simulate measurements from a phantom or image");
  simulate->add_option("--mode", sim.mode, "cs | deblur");
  simulate->add_option("--phantom", sim.phantom, "shepp | geo");
  simulate->add_option("--input", sim.input, "Ground-truth image instead of a phantom");
  simulate->add_option("--size", sim.size, "Phantom size N");
  simulate->add_option("--phantom-seed", sim.phantom_seed, "Seed of the geometric phantom");
  simulate->add_option("--mask", sim.mask, "Sampling mask (cs)");
  simulate->add_option("--coils", sim.coils, "Number of synthetic receive coils (cs)");
  simulate->add_option("--coil-seed", sim.coil_seed, "Seed of the coil sensitivities");
  simulate->add_option("--noise", sim.noise, "Noise standard deviation");
  simulate->add_option("--noise-domain", sim.noise_domain, "kspace | image");
  simulate->add_option("--seed", sim.seed, "Noise seed");
  simulate->add_option("-o,--out", sim.out, "Measurement output file")->required();
  simulate->add_option("--ref-out", sim.ref_out, "Ground-truth output file");
  add_kernel(simulate, sim.kernel);
  add_config(simulate);

  ReconArgs rec;
  auto* recon = app.add_subcommand("recon", "Reconstruct with TVIS or ATVIS");
  rec.app = recon;
  recon->add_option("-i,--input", rec.input, "Measurement file")->required();
  recon->add_option("--mask", rec.mask, "Sampling mask (cs)");
  recon->add_option("--mode", rec.mode, "cs | deblur (default: from the input metadata)");
  recon->add_option("--algo", rec.algo, "tvis | atvis");
  recon->add_option("--phi", rec.phi, "id | log1p | exp");
  recon->add_option("--phi-scale", rec.phi_scale, "Scale of Phi, relative to 2*N*M*beta0 unless --phi-scale-absolute");
  recon->add_flag("--phi-scale-absolute", rec.phi_scale_absolute, "Use --phi-scale as the raw constant c");
  recon->add_option("--tol", rec.tol, "Relative-change stopping tolerance");
  recon->add_option("--max-iter", rec.max_iter, "Iteration cap");
  recon->add_option("--damping", rec.damping, "Landweber step factor");
  recon->add_option("--bc", rec.bc, "pbc | sbc");
  recon->add_option("--shrink", rec.shrink, "componentwise | vector");
  recon->add_option("--tv", rec.tv, "anisotropic | isotropic");
  recon->add_option("--samples", rec.samples, "real | complex sample set for the noise estimate");
  recon->add_option("--beta", rec.beta, "Fixed (TVIS) or initial (ATVIS) threshold");
  recon->add_option("--threads", rec.threads, "Channel-parallel width, 0 = auto (env ATVIS_THREADS)");
  recon->add_option("--ref", rec.ref, "Ground truth for the RLNE column");
  recon->add_option("-o,--out", rec.out, "Reconstructed image");
  recon->add_option("--trace", rec.trace, "Per-iteration CSV trace");
  add_kernel(recon, rec.kernel);
  add_config(recon);

  std::string eval_input;
  std::string eval_ref;
  auto* eval = app.add_subcommand("eval", "Print the RLNE of an image against a reference");
  eval->add_option("-i,--input", eval_input, "Image")->required();
  eval->add_option("--ref", eval_ref, "Reference")->required();
  add_config(eval);

  std::string ex_input;
  std::string ex_out;
  std::string ex_diff;
  auto* exporter = app.add_subcommand("export", "Write moduli as an 8-bit PGM");
  exporter->add_option("-i,--input", ex_input, "Image")->required();
  exporter->add_option("-o,--out", ex_out, "PGM output")->required();
  exporter->add_option("--diff", ex_diff, "Reference; exports |input - reference|");
  add_config(exporter);

  try {
    std::vector<std::string> args = expand_args(argc, argv);
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const atvis::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  try {
    if (*mask) return cmd_mask(mask_args);
    if (*simulate) return cmd_simulate(sim);
    if (*recon) return cmd_recon(rec);
    if (*eval) return cmd_eval(eval_input, eval_ref);
    if (*exporter) return cmd_export(ex_input, ex_out, ex_diff);
  } catch (const atvis::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const atvis::InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

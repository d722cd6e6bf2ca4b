// Acceptance gate for the full pipeline: nine checks, one PASS/FAIL line
// each. Tolerances are pinned as constants next to the checks and the binary
// exits nonzero when any line fails. The desk-scale checks train real models
// and take several minutes; progress goes to stderr.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "scgan/cli.hpp"

namespace fs = std::filesystem;

namespace {

using namespace scgan;

constexpr double kIdentityTol = 1e-12;

constexpr double kFdStep = 1e-4;
constexpr double kFdRelTol = 1e-3;
constexpr double kFdMinPassFraction = 0.95;

constexpr double kNoisyPsnrCenterDb = 20.56;
constexpr double kNoisyPsnrWindowDb = 0.5;

constexpr double kDeskBudgetSeconds = 900.0;
constexpr double kExtractedMeanMax = 0.04;
constexpr double kStdRatioLo = 0.7;
constexpr double kStdRatioHi = 1.3;
constexpr double kDenoiserGainMinDb = 3.0;

struct Line {
  bool pass = false;
  std::string detail = "not run";
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

void progress(const char* msg) { std::fprintf(stderr, "[acceptance] %s\n", msg); }

Tensor uniform_tensor(int n, int c, int h, int w, std::uint64_t seed) {
  Tensor t(n, c, h, w);
  Rng rng(seed);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(0.0, 1.0);
  return t;
}

// 1. Every loss is reproduced from its closed form on hand-built score and
// noise-map tensors; the zero extractor annihilates all three consistency
// terms and an identity extractor reduces them to the clean second moment.
Line loss_identities() {
  double max_dev = 0.0;
  const auto track = [&](double got, double want) {
    max_dev = std::max(max_dev, std::abs(got - want));
  };

  Tensor d_real(1, 1, 1, 2);
  d_real[0] = 0.5;
  d_real[1] = 1.5;
  Tensor d_fake(1, 1, 2, 1);
  d_fake[0] = 0.25;
  d_fake[1] = -0.25;
  const auto [l_d, l_g] = adversarial_losses(d_real, d_fake);
  track(l_d, 0.3125);
  track(l_g, 1.0625);

  // constant score maps of different sizes give size-independent losses, so
  // the reduction is a mean rather than a sum
  Tensor const_real(2, 1, 1, 1);
  const_real.fill(1.5);
  Tensor const_fake(1, 1, 2, 4);
  const_fake.fill(0.5);
  const auto [l_d2, l_g2] = adversarial_losses(const_real, const_fake);
  track(l_d2, 0.5);
  track(l_g2, 0.25);

  Tensor on_clean(1, 1, 2, 2);
  on_clean[0] = 0.5;
  on_clean[1] = -0.5;
  on_clean[2] = 0.5;
  on_clean[3] = -0.5;
  track(clean_consistency_loss(on_clean), 0.25);

  Tensor first(1, 1, 2, 2), second(1, 1, 2, 2);
  for (std::size_t i = 0; i < first.size(); ++i) {
    first[i] = 0.25 * static_cast<real>(i);
    second[i] = first[i] + 0.5;
  }
  track(pure_noise_consistency_loss(second, first), 0.25);
  track(pure_noise_consistency_loss(first, first), 0.0);
  track(reconstruction_consistency_loss(second, first), 0.25);
  track(reconstruction_consistency_loss(first, first), 0.0);

  LossBreakdown b;
  b.l_gan_g = 1.0625;
  b.l_clean = 0.25;
  b.l_pn = 0.25;
  b.l_rec = 0.25;
  track(total_generator_objective(b, 0.5, 2.0, 4.0), 2.6875);

  // an extractor that maps everything to zero: all three consistency losses
  // vanish exactly through the real composite passes
  Rng init(7);
  Generator zero_g(GeneratorConfig{3, 4, 3, 1, 3}, init);
  DiscriminatorConfig tiny;
  tiny.channels = {4, 4, 4, 1};
  tiny.kernels = {3, 3, 1, 1};
  tiny.strides = {1, 1, 1, 1};
  Discriminator unused_d(tiny, init);
  const Tensor noisy = uniform_tensor(2, 1, 8, 8, 8);
  const Tensor clean = uniform_tensor(2, 1, 8, 8, 9);
  const Tensor y = zero_g.forward(noisy, Mode::Eval);
  bool zero_map = true;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] != 0.0) zero_map = false;
  const LossBreakdown zb =
      generator_losses(zero_g, unused_d, noisy, clean, 0.0, 1.0, 1.0, 1.0,
                       false, Mode::TrainFrozenStats);
  zero_map = zero_map && zb.l_clean == 0.0 && zb.l_pn == 0.0 && zb.l_rec == 0.0;

  // an extractor that is the identity map: the pure-noise term vanishes and
  // both clean-side terms equal the clean batch's raw second moment
  double second_moment = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i)
    second_moment += clean[i] * clean[i];
  second_moment /= static_cast<double>(clean.size());
  track(clean_consistency_loss(clean), second_moment);
  track(pure_noise_consistency_loss(noisy, noisy), 0.0);
  track(reconstruction_consistency_loss(clean + noisy, noisy), second_moment);

  return {zero_map && max_dev <= kIdentityTol,
          fmt("scalar losses and identity/zero extractor cases match hand "
              "values, max deviation %.2e (tol %.0e); zero extractor's "
              "composite losses all exactly zero: %s",
              max_dev, kIdentityTol, zero_map ? "yes" : "no")};
}

// 2. Backprop through the combined generator objective agrees with central
// finite differences on a depth-3 extractor over 5x5 inputs.
Line gradient_check() {
  Rng init(11);
  Generator g(GeneratorConfig{3, 4, 3, 1, 3}, init);
  DiscriminatorConfig dcfg;
  dcfg.channels = {4, 4, 4, 1};
  dcfg.kernels = {3, 3, 1, 1};
  dcfg.strides = {1, 1, 1, 1};
  Discriminator d(dcfg, init);

  // leave the zero-output fixed point so every loss path carries gradient
  Rng nudge(12);
  for (auto& a : g.arrays("g"))
    for (std::size_t i = 0; i < a.size; ++i) a.data[i] += 0.05 * nudge.normal();
  for (auto& a : d.arrays("d"))
    for (std::size_t i = 0; i < a.size; ++i) a.data[i] += 0.05 * nudge.normal();

  const Tensor noisy = uniform_tensor(2, 1, 5, 5, 13);
  const Tensor clean = uniform_tensor(2, 1, 5, 5, 14);
  const real w_gan = 1.0, w1 = 0.7, w2 = 0.9, w3 = 1.3;

  // the consistency target is held fixed while parameters move, matching the
  // stop-gradient the analytic backward applies
  GeneratorCtx tctx;
  const Tensor target = g.forward(noisy, Mode::TrainFrozenStats, tctx);

  auto arrays_g = g.arrays("g");
  auto arrays_d = d.arrays("d");
  zero_grads(arrays_g);
  zero_grads(arrays_d);
  generator_losses(g, d, noisy, clean, w_gan, w1, w2, w3, true,
                   Mode::TrainFrozenStats, &target);

  const auto total_at = [&]() {
    return generator_losses(g, d, noisy, clean, w_gan, w1, w2, w3, false,
                            Mode::TrainFrozenStats, &target)
        .total_g;
  };

  std::size_t total = 0, within = 0;
  double worst = 0.0;
  for (auto& a : arrays_g) {
    if (!a.grad) continue;
    for (std::size_t i = 0; i < a.size; ++i) {
      const real saved = a.data[i];
      a.data[i] = saved + kFdStep;
      const double up = total_at();
      a.data[i] = saved - kFdStep;
      const double down = total_at();
      a.data[i] = saved;
      const double fd = (up - down) / (2.0 * kFdStep);
      const double an = a.grad[i];
      const double rel =
          std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, rel);
      ++total;
      if (rel < kFdRelTol) ++within;
    }
  }
  const double frac = static_cast<double>(within) / static_cast<double>(total);
  return {frac >= kFdMinPassFraction,
          fmt("central differences (step %.0e) vs backprop on %zu extractor "
              "parameters: %.1f%% within rel tol %.0e, worst %.2e (need >= "
              "%.0f%%)",
              kFdStep, total, 100.0 * frac, kFdRelTol, worst,
              100.0 * kFdMinPassFraction)};
}

// 3. The extractor keeps spatial shape at every supported depth and the
// critic's score-map extents match the reference architecture.
Line shape_identities() {
  bool ok = true;
  Rng init(17);
  for (int depth : {3, 5, 7, 17}) {
    Generator g(GeneratorConfig{depth, 4, 3, 1, depth}, init);
    const Tensor x = uniform_tensor(2, 1, 24, 24, 18);
    const Tensor y = g.forward(x, Mode::Eval);
    ok = ok && y.n() == x.n() && y.c() == x.c() && y.h() == x.h() &&
         y.w() == x.w();
  }

  const DiscriminatorConfig ref;
  Discriminator d(ref, init);
  const Tensor s64 = d.forward(uniform_tensor(1, 1, 64, 64, 19));
  const Tensor s128 = d.forward(uniform_tensor(1, 1, 128, 128, 20));
  ok = ok && ref.out_extent(64) == 9 && ref.out_extent(128) == 25;
  ok = ok && s64.c() == 1 && s64.h() == 9 && s64.w() == 9;
  ok = ok && s128.h() == 25 && s128.w() == 25;
  return {ok, fmt("extractor keeps spatial shape at depths 3/5/7/17; critic "
                  "maps 64->%dx%d and 128->%dx%d (want 9 and 25)",
                  s64.h(), s64.w(), s128.h(), s128.w())};
}

// 4. Phase weights match an independent piecewise oracle at every epoch of
// three randomly drawn schedules, and ablation masks zero the right terms.
Line schedule_oracle() {
  const auto expected = [](int e,
                           const TrainSchedule& s) -> std::array<real, 3> {
    std::array<real, 3> w{0.0, 0.0, 0.0};
    if (e >= s.ep1) {
      real f = 1.0;
      if (s.ramp == WeightRamp::Linear && e < s.ep2 && s.ep2 - s.ep1 > 1)
        f = static_cast<real>(e - s.ep1 + 1) / static_cast<real>(s.ep2 - s.ep1);
      w[0] = s.w1_target * f;
      w[1] = s.w2_target * f;
    }
    if (e >= s.ep2) {
      real f = 1.0;
      if (s.ramp == WeightRamp::Linear && e < s.ep3 && s.ep3 - s.ep2 > 1)
        f = static_cast<real>(e - s.ep2 + 1) / static_cast<real>(s.ep3 - s.ep2);
      w[2] = s.w3_target * f;
    }
    return w;
  };

  Rng r(23);
  bool ok = true;
  int epochs_checked = 0;
  for (int k = 0; k < 3; ++k) {
    TrainSchedule s;
    s.ep1 = 1 + static_cast<int>(r.uniform_index(10));
    s.ep2 = s.ep1 + static_cast<int>(r.uniform_index(12));
    s.ep3 = s.ep2 + static_cast<int>(r.uniform_index(12));
    s.total_epochs = s.ep3 + static_cast<int>(r.uniform_index(6));
    s.w1_target = r.uniform(0.0, 3.0);
    s.w2_target = r.uniform(0.0, 3.0);
    s.w3_target = r.uniform(0.0, 3.0);
    s.ramp = k == 0 ? WeightRamp::Step : WeightRamp::Linear;
    s.validate();
    for (int e = 0; e <= s.total_epochs; ++e) {
      const auto got = phase_weights(e, s);
      const auto want = expected(e, s);
      for (int j = 0; j < 3; ++j) ok = ok && got[j] == want[j];
      const int want_phase = e < s.ep1 ? 1 : (e < s.ep2 ? 2 : 3);
      ok = ok && phase_index(e, s) == want_phase;
      if (e > 0) {
        const auto prev = phase_weights(e - 1, s);
        for (int j = 0; j < 3; ++j) ok = ok && got[j] >= prev[j];
      }
      ++epochs_checked;
    }
  }

  const std::array<real, 3> w{0.7, 1.3, 2.1};
  ok = ok && apply_mask(w, LossMask::gan_only()) ==
                 std::array<real, 3>{0.0, 0.0, 0.0};
  ok = ok && apply_mask(w, LossMask::no_reconstruction()) ==
                 std::array<real, 3>{0.7, 1.3, 0.0};
  ok = ok && apply_mask(w, LossMask::full()) == w;
  return {ok, fmt("phase weights equal the piecewise oracle at %d epochs "
                  "across 3 random schedules; ablation masks zero exactly "
                  "the advertised terms",
                  epochs_checked)};
}

// 5. The synthetic sigma-25 corpus lands at the expected noisy-vs-clean PSNR.
Line corpus_noise_level() {
  const RunConfig cfg = validate_config(preset_document("desk"));
  const Holdout h = make_holdout(cfg.synth, cfg.channels, 8, 25, 20560);
  const auto quantize = [](ImagePatch p) {
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = std::round(clamp(p[i], 0.0, 255.0));
    return p;
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < h.noisy.size(); ++i)
    sum += psnr(quantize(h.noisy[i]), quantize(h.clean[i]), 255.0);
  const double mean_db = sum / static_cast<double>(h.noisy.size());
  return {std::abs(mean_db - kNoisyPsnrCenterDb) <= kNoisyPsnrWindowDb,
          fmt("mean noisy-vs-clean PSNR over %zu sigma-25 patches: %.2f dB "
              "(want %.2f +/- %.1f)",
              h.noisy.size(), mean_db, kNoisyPsnrCenterDb, kNoisyPsnrWindowDb)};
}

// 6/7/9. One desk-scale run shared by three checks: the full three-loss
// training must extract calibrated noise and lift a downstream denoiser
// within budget; a gan-only baseline with the same seed must not beat it on
// clean response or structure leakage; the constructed pairs must satisfy
// the additive identity off the clip, with rain maps non-negative.
void desk_runs(Line& six, Line& seven, Line& nine) {
  const RunConfig cfg = validate_config(preset_document("desk"));
  const fs::path root = fs::temp_directory_path() / "scgan_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  const auto t0 = std::chrono::steady_clock::now();
  Rng source_root(cfg.seed);
  std::vector<ImagePatch> sources;
  sources.reserve(static_cast<std::size_t>(cfg.synth.sources));
  for (int s = 0; s < cfg.synth.sources; ++s) {
    Rng srng = source_root.child(100 + static_cast<std::uint64_t>(s));
    sources.push_back(make_smooth_image(cfg.synth.source_size,
                                        cfg.synth.source_size, cfg.channels,
                                        srng, cfg.synth.source_lo,
                                        cfg.synth.source_hi));
  }
  const cli::SeedPlan seeds = cli::seed_plan(cfg.seed);
  const UnpairedCorpus built = build_unpaired_corpus(
      sources, cfg.synth.noise_spec(seeds.corpus), cfg.synth.split_ratio,
      seeds.corpus, cfg.synth.patch_size, cfg.synth.patches_per_source);
  // round-trip through storage like the staged pipeline: training sees the
  // 8-bit quantized corpus, not the continuous synthesis output
  save_unpaired(built, root / "corpus");
  const UnpairedCorpus corpus = load_unpaired(root / "corpus");

  progress("training the three-loss extractor at desk scale (minutes)");
  TrainOptions full_opts;
  full_opts.mask = cfg.train.loss_mask();
  full_opts.checkpoint_every = cfg.train.checkpoint_every;
  full_opts.mean_subtract = cfg.train.mean_subtract;
  full_opts.out_dir = root / "net3";
  Trainer net3(cfg.generator, cfg.discriminator, cfg.schedule, cfg.seed);
  net3.train(corpus, full_opts);

  const Holdout holdout =
      make_holdout(cfg.synth, cfg.channels, cfg.eval.holdout_sources,
                   cfg.eval.holdout_patches, seeds.holdout);
  const GeneratorEvaluation ev3 =
      evaluate_generator(net3.generator(), holdout, cfg.train.mean_subtract);

  const PairedCorpus pairs =
      construct_pairs(net3.generator(), corpus.noisy, corpus.clean,
                      seeds.pairs, cfg.pairs.count, cfg.train.mean_subtract);
  save_paired(pairs, root / "paired");
  const PairedCorpus stored_pairs = load_paired(root / "paired");
  Denoiser dn = train_denoiser(stored_pairs, cfg.denoiser, cfg.channels,
                               seeds.denoiser, root / "denoiser_metrics.csv");
  const double gain = denoiser_psnr_gain(dn, holdout);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const double ratio = ev3.extracted_std / (cfg.synth.sigma / 255.0);
  six = {elapsed <= kDeskBudgetSeconds &&
             std::abs(ev3.extracted_mean) <= kExtractedMeanMax &&
             ratio >= kStdRatioLo && ratio <= kStdRatioHi &&
             gain >= kDenoiserGainMinDb,
         fmt("%zu-patch desk run in %.0f s (budget %.0f): extracted mean "
             "%+.4f (|.| <= %.2f), std/sigma %.2f (in [%.1f, %.1f]), "
             "denoiser gain %.2f dB (>= %.1f)",
             corpus.noisy.size() + corpus.clean.size(), elapsed,
             kDeskBudgetSeconds, ev3.extracted_mean, kExtractedMeanMax, ratio,
             kStdRatioLo, kStdRatioHi, gain, kDenoiserGainMinDb)};

  progress("training the gan-only baseline with the same seed (minutes)");
  TrainOptions gan_opts = full_opts;
  gan_opts.mask = LossMask::gan_only();
  gan_opts.out_dir = root / "net1";
  Trainer net1(cfg.generator, cfg.discriminator, cfg.schedule, cfg.seed);
  net1.train(corpus, gan_opts);
  const GeneratorEvaluation ev1 =
      evaluate_generator(net1.generator(), holdout, cfg.train.mean_subtract);
  seven = {ev3.clean_response_mean_abs <= ev1.clean_response_mean_abs &&
               ev3.edge_correlation <= ev1.edge_correlation,
           fmt("three-loss extractor vs gan-only baseline: clean response "
               "%.4f vs %.4f, edge correlation %.3f vs %.3f (trained must "
               "not exceed baseline on either)",
               ev3.clean_response_mean_abs, ev1.clean_response_mean_abs,
               ev3.edge_correlation, ev1.edge_correlation)};

  std::size_t checked = 0, violations = 0;
  for (const auto& p : pairs.pairs) {
    for (std::size_t i = 0; i < p.noisy.size(); ++i) {
      if (p.noisy[i] <= 0.0 || p.noisy[i] >= 255.0) continue;
      ++checked;
      if (p.noisy[i] - p.clean[i] != p.noise[i]) ++violations;
    }
  }
  bool rain_nonnegative = true;
  double rain_mean_lo = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    RainStreakSpec spec;
    spec.seed = 900 + static_cast<std::uint64_t>(k);
    const auto [rain_noisy, truth] =
        add_rain_streaks(corpus.clean[static_cast<std::size_t>(k)], spec);
    (void)rain_noisy;
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] < 0.0) rain_nonnegative = false;
      sum += truth[i];
    }
    rain_mean_lo =
        std::min(rain_mean_lo, sum / static_cast<double>(truth.size()));
  }
  nine = {pairs.pairs.size() == 100 && checked > 0 && violations == 0 &&
              rain_nonnegative && rain_mean_lo > 0.0,
          fmt("%zu constructed pairs: noisy - clean reproduces the recorded "
              "map at all %zu unclipped samples (%zu violations); rain maps "
              "non-negative with smallest mean %.2f",
              pairs.pairs.size(), checked, violations, rain_mean_lo)};
}

// 8. Same-seed runs write byte-identical metrics logs, and a run resumed
// from a mid checkpoint reproduces the interrupted tail bit-for-bit.
Line determinism_and_resume() {
  const fs::path root = fs::temp_directory_path() / "scgan_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);

  Rng source_root(31);
  std::vector<ImagePatch> sources;
  for (int s = 0; s < 4; ++s) {
    Rng srng = source_root.child(static_cast<std::uint64_t>(s));
    sources.push_back(make_smooth_image(24, 24, 1, srng, 60.0, 200.0));
  }
  GaussianNoiseSpec noise;
  noise.sigma = 25.0;
  noise.seed = 32;
  const UnpairedCorpus corpus =
      build_unpaired_corpus(sources, noise, 0.5, 33, 16, 4);

  const GeneratorConfig gcfg{3, 4, 3, 1, 3};
  DiscriminatorConfig dcfg;
  dcfg.channels = {4, 4, 4, 1};
  dcfg.kernels = {3, 3, 3, 3};
  dcfg.strides = {2, 1, 1, 1};
  TrainSchedule sched;
  sched.ep1 = 1;
  sched.ep2 = 2;
  sched.ep3 = 4;
  sched.total_epochs = 4;
  sched.batch_size = 4;

  const auto run = [&](const fs::path& dir) {
    TrainOptions opts;
    opts.checkpoint_every = 2;
    opts.out_dir = dir;
    Trainer t(gcfg, dcfg, sched, 5);
    return t.train(corpus, opts);
  };
  const TrainResult ra = run(root / "a");
  const TrainResult rb = run(root / "b");
  (void)rb;

  const auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string csv_a = slurp(root / "a" / "metrics.csv");
  const bool logs_identical =
      !csv_a.empty() && csv_a == slurp(root / "b" / "metrics.csv");

  Trainer resumed = Trainer::resume(root / "a" / "checkpoints" / "epoch_0002");
  TrainOptions copts;
  copts.checkpoint_every = 2;
  copts.out_dir = root / "c";
  const TrainResult rc = resumed.train(corpus, copts);

  bool tail_matches =
      !rc.metrics.empty() && rc.metrics.size() < ra.metrics.size();
  if (tail_matches) {
    const std::size_t skip = ra.metrics.size() - rc.metrics.size();
    const LossBreakdown& got = rc.metrics.front().losses;
    const LossBreakdown& want = ra.metrics[skip].losses;
    tail_matches = got.l_gan_d == want.l_gan_d && got.l_gan_g == want.l_gan_g &&
                   got.l_clean == want.l_clean && got.l_pn == want.l_pn &&
                   got.l_rec == want.l_rec && got.total_g == want.total_g;
    for (std::size_t j = 0; tail_matches && j < rc.metrics.size(); ++j)
      tail_matches = to_csv(rc.metrics[j]) == to_csv(ra.metrics[skip + j]);
  }
  return {logs_identical && tail_matches,
          fmt("same-seed reruns write byte-identical metrics logs: %s; "
              "resume from the mid checkpoint reproduces every remaining "
              "step bit-for-bit: %s",
              logs_identical ? "yes" : "no", tail_matches ? "yes" : "no")};
}

}  // namespace

int main() {
  Line r[9];
  const auto guard = [](Line& out, Line (*fn)()) {
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
  };
  guard(r[0], loss_identities);
  guard(r[1], gradient_check);
  guard(r[2], shape_identities);
  guard(r[3], schedule_oracle);
  guard(r[4], corpus_noise_level);
  try {
    desk_runs(r[5], r[6], r[8]);
  } catch (const std::exception& e) {
    const std::string msg = std::string("exception: ") + e.what();
    for (int i : {5, 6, 8})
      if (r[i].detail == "not run") r[i] = {false, msg};
  }
  guard(r[7], determinism_and_resume);

  bool all = true;
  for (int i = 0; i < 9; ++i) {
    std::printf("criterion %d: %s  %s\n", i + 1, r[i].pass ? "PASS" : "FAIL",
                r[i].detail.c_str());
    all = all && r[i].pass;
  }
  std::printf("%s\n", all ? "acceptance: all 9 criteria pass"
                          : "acceptance: FAILURES above");
  return all ? 0 : 1;
}

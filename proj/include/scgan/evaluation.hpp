#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "scgan/config.hpp"
#include "scgan/corpus.hpp"
#include "scgan/image.hpp"
#include "scgan/pipeline.hpp"
#include "scgan/synthesis.hpp"
#include "scgan/trainer.hpp"

namespace scgan {

inline real psnr(const ImagePatch& a, const ImagePatch& b, real peak) {
  check(a.same_shape(b), "psnr: shape mismatch");
  check(peak > 0.0, "psnr: peak must be positive");
  real mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const real d = a[i] - b[i];
    mse += d * d;
  }
  mse /= static_cast<real>(a.size());
  if (mse == 0.0) return std::numeric_limits<real>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

// Gradient magnitude by Sobel, replicate borders. This is the "structure"
// signal extracted noise maps are correlated against.
template <class Tag>
inline std::vector<real> edge_magnitude(const Raster<Tag>& img) {
  const int h = img.height(), w = img.width(), c = img.channels();
  std::vector<real> mag(img.size());
  auto px = [&](int ch, int y, int x) {
    y = y < 0 ? 0 : (y >= h ? h - 1 : y);
    x = x < 0 ? 0 : (x >= w ? w - 1 : x);
    return img.at(ch, y, x);
  };
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const real gx = px(ch, y - 1, x + 1) + 2.0 * px(ch, y, x + 1) +
                        px(ch, y + 1, x + 1) - px(ch, y - 1, x - 1) -
                        2.0 * px(ch, y, x - 1) - px(ch, y + 1, x - 1);
        const real gy = px(ch, y + 1, x - 1) + 2.0 * px(ch, y + 1, x) +
                        px(ch, y + 1, x + 1) - px(ch, y - 1, x - 1) -
                        2.0 * px(ch, y - 1, x) - px(ch, y - 1, x + 1);
        mag[(static_cast<std::size_t>(ch) * h + y) * w + x] =
            std::sqrt(gx * gx + gy * gy);
      }
    }
  }
  return mag;
}

// Pearson correlation; 0 when either side has no variance (an all-zero
// noise map correlates with nothing).
inline real pearson(const std::vector<real>& a, const std::vector<real>& b) {
  check(a.size() == b.size() && !a.empty(), "pearson: size mismatch");
  const real n = static_cast<real>(a.size());
  real ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  real sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const real da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

struct NoiseStats {
  real mean = 0.0;
  real stddev = 0.0;
  real vmin = 0.0;
  real vmax = 0.0;
  std::array<real, 64> histogram{};  // mass, sums to 1
  real hist_lo = 0.0, hist_hi = 0.0;
  real edge_correlation = 0.0;  // mean |pearson(map, source edge magnitude)|
  real skewness = 0.0;
  real excess_kurtosis = 0.0;
  std::size_t count = 0;
};

// Aggregates over all pixels of all maps. sources, when nonempty, must be
// aligned with maps and provides the structure signal for the correlation
// score. Skewness and kurtosis are informational (soft normality check).
inline NoiseStats noise_stats(const std::vector<NoiseMap>& maps,
                              const std::vector<ImagePatch>& sources = {}) {
  check(!maps.empty(), "noise_stats: empty map collection");
  check(sources.empty() || sources.size() == maps.size(),
        "noise_stats: sources must align with maps");

  NoiseStats st;
  st.vmin = std::numeric_limits<real>::infinity();
  st.vmax = -std::numeric_limits<real>::infinity();
  real sum = 0.0;
  for (const auto& m : maps) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      sum += m[i];
      st.vmin = std::min(st.vmin, m[i]);
      st.vmax = std::max(st.vmax, m[i]);
    }
    st.count += m.size();
  }
  st.mean = sum / static_cast<real>(st.count);

  real m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (const auto& m : maps) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      const real d = m[i] - st.mean;
      m2 += d * d;
      m3 += d * d * d;
      m4 += d * d * d * d;
    }
  }
  const real n = static_cast<real>(st.count);
  const real var = m2 / n;
  st.stddev = st.count > 1 ? std::sqrt(m2 / (n - 1.0)) : 0.0;
  if (var > 0.0) {
    st.skewness = (m3 / n) / std::pow(var, 1.5);
    st.excess_kurtosis = (m4 / n) / (var * var) - 3.0;
  }

  st.hist_lo = st.vmin;
  st.hist_hi = st.vmax;
  const real span = st.hist_hi - st.hist_lo;
  for (const auto& m : maps) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      int bin = span > 0.0
                    ? static_cast<int>((m[i] - st.hist_lo) / span * 64.0)
                    : 0;
      if (bin > 63) bin = 63;
      if (bin < 0) bin = 0;
      st.histogram[bin] += 1.0;
    }
  }
  for (auto& h : st.histogram) h /= n;

  if (!sources.empty()) {
    real acc = 0.0;
    for (std::size_t k = 0; k < maps.size(); ++k) {
      check(maps[k].same_shape(sources[k]),
            "noise_stats: map and source shapes differ");
      acc += std::abs(pearson(maps[k].values(), edge_magnitude(sources[k])));
    }
    st.edge_correlation = acc / static_cast<real>(maps.size());
  }
  return st;
}

// Held-out material with known ground truth: noisy[i] was synthesized from
// clean[i], so PSNR gains are measurable.
struct Holdout {
  std::vector<ImagePatch> noisy;
  std::vector<ImagePatch> clean;
};

inline Holdout make_holdout(const SynthConfig& synth, int channels,
                            int sources, int patches_per_source,
                            std::uint64_t seed) {
  Rng root(seed);
  Holdout h;
  const int patch =
      synth.patch_size > 0 ? synth.patch_size : synth.source_size;
  for (int s = 0; s < sources; ++s) {
    Rng srng = root.child(s);
    const ImagePatch img =
        make_smooth_image(synth.source_size, synth.source_size, channels,
                          srng, synth.source_lo, synth.source_hi);
    const auto patches =
        crop_patches(img, patch, patches_per_source, root.child_seed(1000 + s));
    for (std::size_t p = 0; p < patches.size(); ++p) {
      const NoiseSpec spec = synth.noise_spec(
          root.child_seed(2000 + s * 1000 + static_cast<std::uint64_t>(p)));
      h.noisy.push_back(add_noise(patches[p], spec).first);
      h.clean.push_back(patches[p]);
    }
  }
  return h;
}

inline Holdout make_gaussian_holdout(int sources, int source_size,
                                     int patch_size, int patches_per_source,
                                     real sigma, int channels,
                                     std::uint64_t seed, real lo = 60.0,
                                     real hi = 200.0) {
  SynthConfig synth;
  synth.kind = "gaussian";
  synth.sigma = sigma;
  synth.sources = sources;
  synth.source_size = source_size;
  synth.source_lo = lo;
  synth.source_hi = hi;
  synth.patch_size = patch_size;
  synth.patches_per_source = patches_per_source;
  return make_holdout(synth, channels, sources, patches_per_source, seed);
}

// What one trained extractor looks like on held-out data. All noise values
// are reported in normalized [0, 1] units.
struct GeneratorEvaluation {
  real clean_response_mean_abs = 0.0;
  real edge_correlation = 0.0;
  real extracted_mean = 0.0;
  real extracted_std = 0.0;
  real psnr_noisy_db = 0.0;
  real psnr_estimate_db = 0.0;
  real psnr_gain_db = 0.0;
  NoiseStats extracted_stats;
};

inline GeneratorEvaluation evaluate_generator(Generator& g, const Holdout& h,
                                              bool mean_subtract = false) {
  check(!h.noisy.empty() && h.noisy.size() == h.clean.size(),
        "evaluate_generator: holdout must pair noisy with clean");

  std::vector<NoiseMap> extracted;
  extracted.reserve(h.noisy.size());
  real psnr_noisy = 0.0, psnr_est = 0.0;
  for (std::size_t i = 0; i < h.noisy.size(); ++i) {
    auto [noise, estimate] = extract_noise(g, h.noisy[i], mean_subtract);
    for (std::size_t k = 0; k < noise.size(); ++k) {
      noise[k] /= 255.0;
      estimate[k] = clamp(estimate[k], 0.0, 255.0);
    }
    psnr_noisy += psnr(h.noisy[i], h.clean[i], 255.0);
    psnr_est += psnr(estimate, h.clean[i], 255.0);
    extracted.push_back(std::move(noise));
  }
  psnr_noisy /= static_cast<real>(h.noisy.size());
  psnr_est /= static_cast<real>(h.noisy.size());

  GeneratorEvaluation ev;
  ev.extracted_stats = noise_stats(extracted, h.clean);
  ev.extracted_mean = ev.extracted_stats.mean;
  ev.extracted_std = ev.extracted_stats.stddev;
  ev.edge_correlation = ev.extracted_stats.edge_correlation;
  ev.psnr_noisy_db = psnr_noisy;
  ev.psnr_estimate_db = psnr_est;
  ev.psnr_gain_db = psnr_est - psnr_noisy;

  real resp = 0.0;
  std::size_t resp_n = 0;
  for (const auto& clean : h.clean) {
    const Tensor out = g.forward(
        to_tensor(normalize(clean, NormalizeMode::Scale)), Mode::Eval);
    for (std::size_t k = 0; k < out.size(); ++k) resp += std::abs(out[k]);
    resp_n += out.size();
  }
  ev.clean_response_mean_abs = resp / static_cast<real>(resp_n);
  return ev;
}

// Mean PSNR improvement of the denoiser's estimates over the raw noisy
// inputs, on held-out pairs with known truth.
inline real denoiser_psnr_gain(Denoiser& dn, const Holdout& h) {
  check(!h.noisy.empty() && h.noisy.size() == h.clean.size(),
        "denoiser_psnr_gain: holdout must pair noisy with clean");
  real before = 0.0, after = 0.0;
  for (std::size_t i = 0; i < h.noisy.size(); ++i) {
    before += psnr(h.noisy[i], h.clean[i], 255.0);
    after += psnr(dn.denoise(h.noisy[i]), h.clean[i], 255.0);
  }
  const real n = static_cast<real>(h.noisy.size());
  return (after - before) / n;
}

inline json noise_stats_to_json(const NoiseStats& st) {
  return {{"mean", st.mean},
          {"std", st.stddev},
          {"min", st.vmin},
          {"max", st.vmax},
          {"count", st.count},
          {"histogram", st.histogram},
          {"histogram_range", {st.hist_lo, st.hist_hi}},
          {"edge_correlation", st.edge_correlation},
          {"skewness", st.skewness},
          {"excess_kurtosis", st.excess_kurtosis}};
}

inline json evaluation_to_json(const GeneratorEvaluation& ev) {
  return {{"clean_response_mean_abs", ev.clean_response_mean_abs},
          {"edge_correlation", ev.edge_correlation},
          {"extracted_mean", ev.extracted_mean},
          {"extracted_std", ev.extracted_std},
          {"psnr_noisy_db", ev.psnr_noisy_db},
          {"psnr_estimate_db", ev.psnr_estimate_db},
          {"psnr_gain_db", ev.psnr_gain_db},
          {"extracted_stats", noise_stats_to_json(ev.extracted_stats)}};
}

struct AblationVariant {
  std::string name;
  LossMask mask;
  std::vector<MetricsRow> metrics;
  GeneratorEvaluation eval;
};

struct AblationResult {
  std::vector<AblationVariant> variants;  // net1, net2, net3 in order
};

inline json ablation_summary_json(const AblationResult& r) {
  json s;
  for (const auto& v : r.variants) {
    s[v.name] = {{"clean_response_mean_abs", v.eval.clean_response_mean_abs},
                 {"edge_correlation", v.eval.edge_correlation},
                 {"extracted_std", v.eval.extracted_std},
                 {"psnr_gain_db", v.eval.psnr_gain_db}};
  }
  return s;
}

// Trains the three loss-mask variants with identical seeds and data order,
// then evaluates each on the same holdout. Variant names follow the usual
// ablation ladder: net1 = adversarial only, net2 adds the clean and
// pure-noise terms, net3 adds reconstruction.
inline AblationResult run_ablation(const UnpairedCorpus& corpus,
                                   const GeneratorConfig& gcfg,
                                   const DiscriminatorConfig& dcfg,
                                   const TrainSchedule& sched,
                                   const Holdout& holdout, std::uint64_t seed,
                                   const std::filesystem::path& out_dir = {},
                                   int checkpoint_every = 0,
                                   bool mean_subtract = false) {
  const std::array<std::pair<const char*, LossMask>, 3> specs{
      {{"net1", LossMask::gan_only()},
       {"net2", LossMask::no_reconstruction()},
       {"net3", LossMask::full()}}};

  AblationResult result;
  for (const auto& [name, mask] : specs) {
    Trainer trainer(gcfg, dcfg, sched, seed);
    TrainOptions opts;
    opts.mask = mask;
    opts.checkpoint_every = checkpoint_every;
    opts.mean_subtract = mean_subtract;
    if (!out_dir.empty()) opts.out_dir = out_dir / name;
    TrainResult tr = trainer.train(corpus, opts);

    AblationVariant v;
    v.name = name;
    v.mask = mask;
    v.metrics = std::move(tr.metrics);
    v.eval = evaluate_generator(trainer.generator(), holdout, mean_subtract);
    result.variants.push_back(std::move(v));
  }

  if (!out_dir.empty()) {
    detail::write_file(out_dir / "summary.json",
                       ablation_summary_json(result).dump(2) + "\n");
  }
  return result;
}

}  // namespace scgan

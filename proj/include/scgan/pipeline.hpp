#pragma once

#include <filesystem>
#include <fstream>
#include <numeric>
#include <utility>
#include <vector>

#include "scgan/adam.hpp"
#include "scgan/checkpoint.hpp"
#include "scgan/config.hpp"
#include "scgan/corpus.hpp"
#include "scgan/generator.hpp"
#include "scgan/image.hpp"
#include "scgan/rng.hpp"

namespace scgan {

// Runs the trained extractor on one storage-range patch. The clean estimate
// is the unclipped difference; the returned noise map is recomputed as
// noisy - clean_estimate so that identity holds bit-for-bit, not merely to
// rounding.
inline std::pair<NoiseMap, ImagePatch> extract_noise(Generator& g,
                                                     const ImagePatch& noisy,
                                                     bool mean_subtract = false) {
  ImagePatch x = normalize(noisy, NormalizeMode::Scale);
  if (mean_subtract) x = normalize(x, NormalizeMode::MeanSubtract);
  const Tensor out = g.forward(to_tensor(x), Mode::Eval);
  ImagePatch clean_estimate = noisy;
  NoiseMap noise(noisy.height(), noisy.width(), noisy.channels());
  for (std::size_t i = 0; i < noise.size(); ++i) {
    clean_estimate[i] = noisy[i] - 255.0 * out[i];
    noise[i] = noisy[i] - clean_estimate[i];
  }
  return {std::move(noise), std::move(clean_estimate)};
}

// Builds `count` pairs (default: one per clean patch). Each clean patch gets
// noise extracted from a uniformly drawn noisy patch (with replacement). The
// recorded map is the representable difference (clean + noise) - clean, so
// noisy - clean reproduces it exactly wherever the clip did not bind.
inline PairedCorpus construct_pairs(Generator& g,
                                    const std::vector<ImagePatch>& noisy_set,
                                    const std::vector<ImagePatch>& clean_set,
                                    std::uint64_t seed, int count = 0,
                                    bool mean_subtract = false) {
  check(!noisy_set.empty() && !clean_set.empty(),
        "construct_pairs: both sets must be nonempty");
  if (count == 0) count = static_cast<int>(clean_set.size());
  check(count > 0, "construct_pairs: count must be positive");

  Rng rng(seed);
  PairedCorpus corpus;
  corpus.pairs.reserve(count);
  for (int j = 0; j < count; ++j) {
    const ImagePatch& clean = clean_set[j % clean_set.size()];
    const ImagePatch& src = noisy_set[rng.uniform_index(noisy_set.size())];
    check(src.same_shape(clean),
          "construct_pairs: noisy and clean patches must share one shape");
    auto [g_noise, est_unused] = extract_noise(g, src, mean_subtract);
    (void)est_unused;

    ImagePair pair{ImagePatch(clean.height(), clean.width(), clean.channels()),
                   clean,
                   NoiseMap(clean.height(), clean.width(), clean.channels())};
    for (std::size_t i = 0; i < g_noise.size(); ++i) {
      const real sum = clean[i] + g_noise[i];
      pair.noisy[i] = clamp(sum, 0.0, 255.0);
      pair.noise[i] = sum - clean[i];
    }
    corpus.pairs.push_back(std::move(pair));
  }
  corpus.provenance["seed"] = seed;
  corpus.provenance["range"] = "storage";
  corpus.provenance["kind"] = "denoise";
  return corpus;
}

namespace detail {

// Catmull-Rom cubic, the conventional bicubic interpolation kernel.
inline real cubic_weight(real t) {
  constexpr real a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0;
  if (t < 2.0) return a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a;
  return 0.0;
}

// One separable pass; the kernel is widened by the scale factor so the
// result is antialiased (each output pixel averages about 4r inputs).
inline void bicubic_axis(const std::vector<real>& src, int n_in,
                         std::vector<real>& dst, int n_out, int r) {
  for (int o = 0; o < n_out; ++o) {
    const real center = (o + 0.5) * r - 0.5;
    const int lo = static_cast<int>(std::floor(center)) - 2 * r + 1;
    const int hi = static_cast<int>(std::floor(center)) + 2 * r;
    real acc = 0.0, wsum = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const real w = cubic_weight((i - center) / r);
      if (w == 0.0) continue;
      const int ci = i < 0 ? 0 : (i >= n_in ? n_in - 1 : i);
      acc += w * src[ci];
      wsum += w;
    }
    dst[o] = acc / wsum;
  }
}

}  // namespace detail

// Antialiased bicubic downsampling by an integer factor.
inline ImagePatch bicubic_downsample(const ImagePatch& hr, int r) {
  check(r == 2 || r == 3 || r == 4, "bicubic_downsample: r must be 2, 3 or 4");
  check(hr.height() % r == 0 && hr.width() % r == 0,
        "bicubic_downsample: dimensions must be divisible by r");
  const int oh = hr.height() / r, ow = hr.width() / r;
  ImagePatch out(oh, ow, hr.channels());
  std::vector<real> row_in(hr.width()), row_out(ow);
  std::vector<real> col_in(hr.height()), col_out(oh);
  // rows first at full height, then columns
  std::vector<real> mid(static_cast<std::size_t>(hr.height()) * ow);
  for (int c = 0; c < hr.channels(); ++c) {
    for (int y = 0; y < hr.height(); ++y) {
      for (int x = 0; x < hr.width(); ++x) row_in[x] = hr.at(c, y, x);
      detail::bicubic_axis(row_in, hr.width(), row_out, ow, r);
      for (int x = 0; x < ow; ++x) mid[static_cast<std::size_t>(y) * ow + x] = row_out[x];
    }
    for (int x = 0; x < ow; ++x) {
      for (int y = 0; y < hr.height(); ++y)
        col_in[y] = mid[static_cast<std::size_t>(y) * ow + x];
      detail::bicubic_axis(col_in, hr.height(), col_out, oh, r);
      for (int y = 0; y < oh; ++y) out.at(c, y, x) = col_out[y];
    }
  }
  return out;
}

// Super-resolution variant: clean LR images come from bicubic downsampling
// of the HR set; extracted noise is injected into the LR side and the pair
// keeps the original HR image as its target.
inline PairedCorpus construct_sr_pairs(Generator& g,
                                       const std::vector<ImagePatch>& hr_set,
                                       const std::vector<ImagePatch>& noisy_lr_set,
                                       int r, std::uint64_t seed,
                                       bool mean_subtract = false) {
  check(!hr_set.empty() && !noisy_lr_set.empty(),
        "construct_sr_pairs: both sets must be nonempty");
  Rng rng(seed);
  PairedCorpus corpus;
  corpus.pairs.reserve(hr_set.size());
  for (const ImagePatch& hr : hr_set) {
    const ImagePatch lr_clean = bicubic_downsample(hr, r);
    const ImagePatch& src = noisy_lr_set[rng.uniform_index(noisy_lr_set.size())];
    check(src.same_shape(lr_clean),
          "construct_sr_pairs: noisy LR patches must match HR/r size");
    auto [g_noise, est_unused] = extract_noise(g, src, mean_subtract);
    (void)est_unused;

    ImagePair pair{ImagePatch(lr_clean.height(), lr_clean.width(), lr_clean.channels()),
                   hr,
                   NoiseMap(lr_clean.height(), lr_clean.width(), lr_clean.channels())};
    for (std::size_t i = 0; i < g_noise.size(); ++i) {
      const real sum = lr_clean[i] + g_noise[i];
      pair.noisy[i] = clamp(sum, 0.0, 255.0);
      pair.noise[i] = sum - lr_clean[i];
    }
    corpus.pairs.push_back(std::move(pair));
  }
  corpus.provenance["seed"] = seed;
  corpus.provenance["range"] = "storage";
  corpus.provenance["kind"] = "super_resolution";
  corpus.provenance["scale_factor"] = r;
  return corpus;
}

// Residual denoiser: same backbone as the extractor, trained supervised on
// constructed pairs to predict the recorded noise map.
class Denoiser {
 public:
  Denoiser(const DenoiserConfig& cfg, int channels, std::uint64_t seed)
      : cfg_(validated(cfg)), rng_(seed),
        net_(GeneratorConfig{cfg.depth, cfg.mid_channels, 3, channels,
                             cfg.depth},
             rng_) {}

  const DenoiserConfig& config() const { return cfg_; }
  Generator& net() { return net_; }

  NoiseMap predict_noise(const ImagePatch& noisy) {
    const Tensor out =
        net_.forward(to_tensor(normalize(noisy, NormalizeMode::Scale)),
                     Mode::Eval);
    NoiseMap m(noisy.height(), noisy.width(), noisy.channels());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = 255.0 * out[i];
    return m;
  }

  // Output plus the residual actually removed; output + residual == input
  // exactly (before the clip), by the same representable-difference device
  // used in pair construction.
  std::pair<ImagePatch, NoiseMap> denoise_with_residual(const ImagePatch& noisy) {
    const NoiseMap pred = predict_noise(noisy);
    ImagePatch out = noisy;
    NoiseMap residual(noisy.height(), noisy.width(), noisy.channels());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const real estimate = noisy[i] - pred[i];
      residual[i] = noisy[i] - estimate;
      out[i] = clamp(estimate, 0.0, 255.0);
    }
    return {std::move(out), std::move(residual)};
  }

  ImagePatch denoise(const ImagePatch& noisy) {
    return denoise_with_residual(noisy).first;
  }

  // Minimizes mean squared error between predicted and recorded noise maps.
  // Returns per-epoch mean losses.
  std::vector<real> train(const PairedCorpus& pairs,
                          const std::filesystem::path& log_path = {}) {
    check(!pairs.pairs.empty(), "Denoiser::train: empty corpus");
    const int ps = cfg_.patch_size;
    const auto& first = pairs.pairs.front();
    check(ps == 0 || (ps >= 1 && ps <= first.noisy.height() &&
                      ps <= first.noisy.width()),
          "Denoiser::train: patch_size exceeds pair size");

    Adam adam({cfg_.lr, 0.9, 0.999, 1e-8}, net_.arrays("denoiser"));
    const std::size_t n = pairs.pairs.size();
    const int batch = cfg_.batch_size;
    const int steps = static_cast<int>((n + batch - 1) / batch);
    const int h = ps > 0 ? ps : first.noisy.height();
    const int w = ps > 0 ? ps : first.noisy.width();
    const int c = first.noisy.channels();

    std::ofstream log;
    if (!log_path.empty()) {
      log.open(log_path);
      if (!log) throw IoError("cannot open denoiser log: " + log_path.string());
      log << "epoch,step,loss\n";
    }

    std::vector<real> epoch_losses;
    std::vector<std::size_t> order(n);
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng_.shuffle(order);
      real sum = 0.0;
      for (int s = 0; s < steps; ++s) {
        const std::size_t begin = static_cast<std::size_t>(s) * batch;
        const std::size_t bs = std::min<std::size_t>(batch, n - begin);
        Tensor x(static_cast<int>(bs), c, h, w);
        Tensor t(static_cast<int>(bs), c, h, w);
        for (std::size_t j = 0; j < bs; ++j) {
          const ImagePair& p = pairs.pairs[order[begin + j]];
          int y0 = 0, x0 = 0;
          if (ps > 0) {
            y0 = static_cast<int>(rng_.uniform_index(p.noisy.height() - ps + 1));
            x0 = static_cast<int>(rng_.uniform_index(p.noisy.width() - ps + 1));
          }
          for (int cc = 0; cc < c; ++cc) {
            for (int y = 0; y < h; ++y) {
              for (int xx = 0; xx < w; ++xx) {
                x.at(static_cast<int>(j), cc, y, xx) =
                    p.noisy.at(cc, y0 + y, x0 + xx) / 255.0;
                t.at(static_cast<int>(j), cc, y, xx) =
                    p.noise.at(cc, y0 + y, x0 + xx) / 255.0;
              }
            }
          }
        }

        GeneratorCtx ctx;
        adam.zero_grads();
        const Tensor pred = net_.forward(x, Mode::Train, ctx);
        const real loss = mean_squared_diff(pred, t);
        check(std::isfinite(loss), "Denoiser::train: non-finite loss");
        Tensor grad = pred;
        const real sc = 2.0 / static_cast<real>(pred.size());
        for (std::size_t i = 0; i < grad.size(); ++i)
          grad[i] = sc * (pred[i] - t[i]);
        net_.backward(grad, ctx);
        adam.step();

        sum += loss;
        if (log.is_open()) {
          char buf[96];
          std::snprintf(buf, sizeof(buf), "%d,%d,%.17g", epoch, s, loss);
          log << buf << '\n';
        }
      }
      epoch_losses.push_back(sum / steps);
    }
    return epoch_losses;
  }

  void save(const std::filesystem::path& dir) {
    json meta;
    meta["version"] = version_string();
    meta["kind"] = "denoiser";
    meta["channels"] = net_.config().in_channels;
    meta["denoiser"] = {{"depth", cfg_.depth},
                        {"mid_channels", cfg_.mid_channels},
                        {"epochs", cfg_.epochs},
                        {"lr", cfg_.lr},
                        {"batch_size", cfg_.batch_size},
                        {"patch_size", cfg_.patch_size}};
    save_checkpoint(dir, meta, net_.arrays("denoiser"));
  }

  static Denoiser load(const std::filesystem::path& dir) {
    const json meta = read_checkpoint_meta(dir);
    if (meta.value("kind", "") != "denoiser")
      throw CheckpointError("not a denoiser checkpoint: " + dir.string());
    DenoiserConfig cfg;
    const json& d = meta.at("denoiser");
    cfg.depth = d.at("depth").get<int>();
    cfg.mid_channels = d.at("mid_channels").get<int>();
    cfg.epochs = d.at("epochs").get<int>();
    cfg.lr = d.at("lr").get<real>();
    cfg.batch_size = d.at("batch_size").get<int>();
    cfg.patch_size = d.at("patch_size").get<int>();
    Denoiser dn(cfg, meta.at("channels").get<int>(), 0);
    load_checkpoint_arrays(dir, meta, dn.net_.arrays("denoiser"));
    return dn;
  }

 private:
  static DenoiserConfig validated(const DenoiserConfig& cfg) {
    cfg.validate();
    return cfg;
  }

  DenoiserConfig cfg_;
  Rng rng_;
  Generator net_;
};

inline Denoiser train_denoiser(const PairedCorpus& pairs,
                               const DenoiserConfig& cfg, int channels,
                               std::uint64_t seed,
                               const std::filesystem::path& log_path = {}) {
  Denoiser d(cfg, channels, seed);
  d.train(pairs, log_path);
  return d;
}

}  // namespace scgan

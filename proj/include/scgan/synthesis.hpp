#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "scgan/common.hpp"
#include "scgan/corpus.hpp"
#include "scgan/image.hpp"
#include "scgan/rng.hpp"

namespace scgan {

// Additive i.i.d. Gaussian noise in 8-bit pixel units, zero mean.
struct GaussianNoiseSpec {
  real sigma = 25.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(sigma > 0.0))
      throw ConfigError("invalid gaussian noise spec", {"sigma must be > 0"});
  }
};

// Oriented positive streaks: each streak is an anti-aliased line segment
// with uniform-random center, angle, length and intensity. Ranges are
// inclusive; lo == hi pins the value.
struct RainStreakSpec {
  int count = 8;
  real length_lo = 8.0, length_hi = 20.0;
  real angle_lo = 60.0, angle_hi = 120.0;
  real intensity_lo = 30.0, intensity_hi = 90.0;
  real thickness = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    std::vector<std::string> violations;
    if (count < 0) violations.push_back("count must be >= 0");
    if (!(length_lo >= 1.0 && length_hi >= length_lo))
      violations.push_back("length range must satisfy 1 <= lo <= hi");
    if (!(angle_hi >= angle_lo))
      violations.push_back("angle range must satisfy lo <= hi");
    if (!(intensity_lo > 0.0 && intensity_hi >= intensity_lo))
      violations.push_back("intensity range must satisfy 0 < lo <= hi");
    if (!(thickness >= 1.0))
      violations.push_back("thickness must be >= 1");
    if (!violations.empty())
      throw ConfigError("invalid rain streak spec", violations);
  }
};

using NoiseSpec = std::variant<GaussianNoiseSpec, RainStreakSpec>;

inline std::pair<ImagePatch, NoiseMap> add_gaussian_noise(
    const ImagePatch& patch, const GaussianNoiseSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  NoiseMap truth(patch.height(), patch.width(), patch.channels());
  ImagePatch noisy = patch;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = spec.sigma * rng.normal();
    noisy[i] = clamp(patch[i] + truth[i], 0.0, 255.0);
  }
  return {std::move(noisy), std::move(truth)};
}

// Adds one anti-aliased segment to every channel of the map. Coverage falls
// off linearly from full intensity over one pixel past the half-thickness.
inline void rasterize_streak(NoiseMap& map, real x0, real y0, real x1, real y1,
                             real thickness, real intensity) {
  const real dx = x1 - x0, dy = y1 - y0;
  const real len_sq = dx * dx + dy * dy;
  const real reach = thickness / 2.0 + 0.5;
  const int ymin = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - reach)));
  const int ymax = std::min(map.height() - 1,
                            static_cast<int>(std::ceil(std::max(y0, y1) + reach)));
  const int xmin = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - reach)));
  const int xmax = std::min(map.width() - 1,
                            static_cast<int>(std::ceil(std::max(x0, x1) + reach)));
  for (int y = ymin; y <= ymax; ++y) {
    for (int x = xmin; x <= xmax; ++x) {
      real t = 0.0;
      if (len_sq > 0.0)
        t = clamp(((x - x0) * dx + (y - y0) * dy) / len_sq, 0.0, 1.0);
      const real px = x0 + t * dx - x, py = y0 + t * dy - y;
      const real dist = std::sqrt(px * px + py * py);
      const real coverage = clamp(0.5 + thickness / 2.0 - dist, 0.0, 1.0);
      if (coverage <= 0.0) continue;
      for (int c = 0; c < map.channels(); ++c)
        map.at(c, y, x) += coverage * intensity;
    }
  }
}

inline std::pair<ImagePatch, NoiseMap> add_rain_streaks(
    const ImagePatch& patch, const RainStreakSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  NoiseMap truth(patch.height(), patch.width(), patch.channels());
  constexpr real kDegToRad = 3.14159265358979323846 / 180.0;
  for (int s = 0; s < spec.count; ++s) {
    const real cx = rng.uniform(0.0, static_cast<real>(patch.width() - 1));
    const real cy = rng.uniform(0.0, static_cast<real>(patch.height() - 1));
    const real angle = rng.uniform(spec.angle_lo, spec.angle_hi) * kDegToRad;
    const real length = rng.uniform(spec.length_lo, spec.length_hi);
    const real intensity = rng.uniform(spec.intensity_lo, spec.intensity_hi);
    const real hx = std::cos(angle) * length / 2.0;
    const real hy = std::sin(angle) * length / 2.0;
    rasterize_streak(truth, cx - hx, cy - hy, cx + hx, cy + hy,
                     spec.thickness, intensity);
  }
  ImagePatch noisy = patch;
  for (std::size_t i = 0; i < truth.size(); ++i)
    noisy[i] = clamp(patch[i] + truth[i], 0.0, 255.0);
  return {std::move(noisy), std::move(truth)};
}

inline std::pair<ImagePatch, NoiseMap> add_noise(const ImagePatch& patch,
                                                 const NoiseSpec& spec) {
  if (std::holds_alternative<GaussianNoiseSpec>(spec))
    return add_gaussian_noise(patch, std::get<GaussianNoiseSpec>(spec));
  return add_rain_streaks(patch, std::get<RainStreakSpec>(spec));
}

inline std::vector<ImagePatch> crop_patches(const ImagePatch& image, int size,
                                            int count, std::uint64_t seed) {
  check(size >= 1, "crop_patches: size must be >= 1");
  check(size <= image.height() && size <= image.width(),
        "crop_patches: size exceeds image dimensions");
  Rng rng(seed);
  std::vector<ImagePatch> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int y0 = static_cast<int>(rng.uniform_index(image.height() - size + 1));
    const int x0 = static_cast<int>(rng.uniform_index(image.width() - size + 1));
    ImagePatch p(size, size, image.channels());
    for (int c = 0; c < image.channels(); ++c)
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
          p.at(c, y, x) = image.at(c, y0 + y, x0 + x);
    out.push_back(std::move(p));
  }
  return out;
}

// Smooth procedural source image: a few low-frequency cosine waves plus a
// linear gradient, rescaled so each channel spans [lo, hi] exactly. Keeps
// synthetic corpora in mid-tones where additive noise rarely clips.
inline ImagePatch make_smooth_image(int h, int w, int channels, Rng& rng,
                                    real lo = 60.0, real hi = 200.0) {
  check(hi > lo && lo >= 0.0 && hi <= 255.0,
        "make_smooth_image: need 0 <= lo < hi <= 255");
  ImagePatch img(h, w, channels);
  constexpr real kTwoPi = 2.0 * 3.14159265358979323846;
  for (int c = 0; c < channels; ++c) {
    const real gx = rng.uniform(-1.0, 1.0);
    const real gy = rng.uniform(-1.0, 1.0);
    struct Wave { real a, fx, fy, phase; };
    Wave waves[3];
    for (auto& wv : waves) {
      wv = {rng.uniform(0.5, 1.0), rng.uniform(0.3, 2.0),
            rng.uniform(0.3, 2.0), rng.uniform(0.0, kTwoPi)};
    }
    real vmin = 1e300, vmax = -1e300;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const real u = static_cast<real>(x) / w;
        const real v = static_cast<real>(y) / h;
        real s = gx * u + gy * v;
        for (const auto& wv : waves)
          s += wv.a * std::cos(kTwoPi * (wv.fx * u + wv.fy * v) + wv.phase);
        img.at(c, y, x) = s;
        vmin = std::min(vmin, s);
        vmax = std::max(vmax, s);
      }
    }
    const real span = vmax - vmin;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        img.at(c, y, x) = span > 0.0
                              ? lo + (img.at(c, y, x) - vmin) / span * (hi - lo)
                              : (lo + hi) / 2.0;
      }
    }
  }
  return img;
}

// Splits sources disjointly, crops patches from each side, and noises the
// first side. patch_size 0 keeps whole images.
inline UnpairedCorpus build_unpaired_corpus(
    const std::vector<ImagePatch>& clean_sources, const NoiseSpec& noise_spec,
    real split_ratio, std::uint64_t seed, int patch_size = 0,
    int patches_per_source = 1) {
  check(clean_sources.size() >= 2,
        "build_unpaired_corpus: need at least 2 source images");
  std::visit([](const auto& s) { s.validate(); }, noise_spec);
  const std::size_t n = clean_sources.size();
  const auto n_noisy = static_cast<std::size_t>(
      static_cast<real>(n) * split_ratio + 0.5);
  check(n_noisy >= 1 && n_noisy < n,
        "build_unpaired_corpus: split_ratio leaves one side empty");
  check(patch_size >= 0 && patches_per_source >= 1,
        "build_unpaired_corpus: invalid cropping parameters");

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  auto crops = [&](const ImagePatch& src, std::uint64_t sub) {
    if (patch_size == 0) return std::vector<ImagePatch>{src};
    return crop_patches(src, patch_size, patches_per_source, sub);
  };

  UnpairedCorpus corpus;
  Rng sub_seeds = rng.child(1);
  for (std::size_t i = 0; i < n; ++i) {
    const ImagePatch& src = clean_sources[order[i]];
    const std::uint64_t crop_seed = sub_seeds.next_u64();
    const std::uint64_t noise_seed = sub_seeds.next_u64();
    for (auto& patch : crops(src, crop_seed)) {
      if (i < n_noisy) {
        NoiseSpec per_patch = noise_spec;
        std::visit([&](auto& s) { s.seed = noise_seed + corpus.noisy.size(); },
                   per_patch);
        corpus.noisy.push_back(add_noise(patch, per_patch).first);
      } else {
        corpus.clean.push_back(std::move(patch));
      }
    }
  }

  corpus.provenance["seed"] = seed;
  corpus.provenance["split_ratio"] = split_ratio;
  corpus.provenance["patch_size"] = patch_size;
  corpus.provenance["patches_per_source"] = patches_per_source;
  corpus.provenance["range"] = "storage";
  if (std::holds_alternative<GaussianNoiseSpec>(noise_spec)) {
    const auto& g = std::get<GaussianNoiseSpec>(noise_spec);
    corpus.provenance["noise"] = {{"kind", "gaussian"}, {"sigma", g.sigma}};
  } else {
    const auto& r = std::get<RainStreakSpec>(noise_spec);
    corpus.provenance["noise"] = {
        {"kind", "rain"},           {"count", r.count},
        {"length", {r.length_lo, r.length_hi}},
        {"angle", {r.angle_lo, r.angle_hi}},
        {"intensity", {r.intensity_lo, r.intensity_hi}},
        {"thickness", r.thickness}};
  }
  return corpus;
}

}  // namespace scgan

#pragma once

#include <png.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "scgan/common.hpp"
#include "scgan/tensor.hpp"

namespace scgan {

// Planar CHW raster of real values. ImagePatch and NoiseMap share the layout
// but are distinct types; a NoiseMap is only ever valid alongside the patch
// it was extracted from, and the type system keeps the two from mixing.
template <class Tag>
class Raster {
 public:
  Raster() = default;
  Raster(int height, int width, int channels)
      : h_(height), w_(width), c_(channels),
        v_(static_cast<std::size_t>(height) * width * channels, 0.0) {
    check(height >= 1 && width >= 1, "Raster: height and width must be >= 1");
    check(channels == 1 || channels == 3, "Raster: channels must be 1 or 3");
  }

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  std::size_t size() const { return v_.size(); }
  std::size_t pixels() const { return static_cast<std::size_t>(h_) * w_; }

  real& at(int c, int y, int x) { return v_[(static_cast<std::size_t>(c) * h_ + y) * w_ + x]; }
  real at(int c, int y, int x) const { return v_[(static_cast<std::size_t>(c) * h_ + y) * w_ + x]; }

  real& operator[](std::size_t i) { return v_[i]; }
  real operator[](std::size_t i) const { return v_[i]; }

  std::vector<real>& values() { return v_; }
  const std::vector<real>& values() const { return v_; }

  void fill(real v) { std::fill(v_.begin(), v_.end(), v); }

  template <class OtherTag>
  bool same_shape(const Raster<OtherTag>& o) const {
    return h_ == o.height() && w_ == o.width() && c_ == o.channels();
  }

 private:
  int h_ = 0, w_ = 0, c_ = 0;
  std::vector<real> v_;
};

struct ImageTag {};
struct NoiseTag {};
using ImagePatch = Raster<ImageTag>;
using NoiseMap = Raster<NoiseTag>;

class FileMissingError : public IoError {
 public:
  using IoError::IoError;
};
class UnsupportedFormatError : public IoError {
 public:
  using IoError::IoError;
};
class CorruptDataError : public IoError {
 public:
  using IoError::IoError;
};

namespace detail {

inline bool has_png_signature(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) return false;
  unsigned char sig[8] = {};
  const std::size_t got = std::fread(sig, 1, 8, fp);
  std::fclose(fp);
  return got == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

}  // namespace detail

// Reads an 8-bit grayscale or RGB PNG; values come back in [0, 255].
// Palette, alpha and 16-bit files are rejected rather than converted so the
// load/save round trip stays lossless.
inline ImagePatch load_patch(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw FileMissingError("load_patch: no such file: " + path);
  }
  if (!detail::has_png_signature(path)) {
    throw UnsupportedFormatError("load_patch: not a PNG file: " + path);
  }

  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    std::string msg = img.message;
    png_image_free(&img);
    throw CorruptDataError("load_patch: unreadable PNG " + path + ": " + msg);
  }
  if (img.format & (PNG_FORMAT_FLAG_LINEAR | PNG_FORMAT_FLAG_COLORMAP |
                    PNG_FORMAT_FLAG_ALPHA)) {
    png_image_free(&img);
    throw UnsupportedFormatError(
        "load_patch: only 8-bit grayscale or RGB PNG is supported: " + path);
  }
  const int channels = (img.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  img.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  const int h = static_cast<int>(img.height);
  const int w = static_cast<int>(img.width);
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw CorruptDataError("load_patch: corrupt PNG " + path + ": " + msg);
  }

  ImagePatch p(h, w, channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        p.at(c, y, x) = static_cast<real>(
            buf[(static_cast<std::size_t>(y) * w + x) * channels + c]);
      }
    }
  }
  return p;
}

// Writes an 8-bit PNG; values are rounded to the nearest integer and clamped
// to storage range, so integer-valued patches survive a round trip exactly.
inline void save_patch(const ImagePatch& p, const std::string& path) {
  const int h = p.height(), w = p.width(), channels = p.channels();
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(h) * w * channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        const real v = clamp(p.at(c, y, x), 0.0, 255.0);
        buf[(static_cast<std::size_t>(y) * w + x) * channels + c] =
            static_cast<std::uint8_t>(std::lround(v));
      }
    }
  }

  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(w);
  img.height = static_cast<png_uint_32>(h);
  img.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&img, path.c_str(), 0, buf.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw IoError("save_patch: cannot write " + path + ": " + msg);
  }
}

enum class NormalizeMode { Scale, MeanSubtract };

inline ImagePatch normalize(const ImagePatch& p, NormalizeMode mode) {
  ImagePatch out = p;
  if (mode == NormalizeMode::Scale) {
    for (auto& v : out.values()) v /= 255.0;
    return out;
  }
  for (int c = 0; c < p.channels(); ++c) {
    real s = 0.0;
    for (int y = 0; y < p.height(); ++y) {
      for (int x = 0; x < p.width(); ++x) s += p.at(c, y, x);
    }
    const real mean = s / static_cast<real>(p.pixels());
    for (int y = 0; y < p.height(); ++y) {
      for (int x = 0; x < p.width(); ++x) out.at(c, y, x) -= mean;
    }
  }
  return out;
}

// Stacks equally-shaped patches into an NCHW batch.
template <class Tag>
inline Tensor to_tensor(const std::vector<Raster<Tag>>& batch) {
  check(!batch.empty(), "to_tensor: empty batch");
  const auto& first = batch.front();
  Tensor t(static_cast<int>(batch.size()), first.channels(), first.height(),
           first.width());
  for (std::size_t n = 0; n < batch.size(); ++n) {
    check(batch[n].same_shape(first), "to_tensor: mixed shapes in batch");
    const std::size_t stride = first.size();
    for (std::size_t i = 0; i < stride; ++i) t[n * stride + i] = batch[n][i];
  }
  return t;
}

template <class Tag>
inline Tensor to_tensor(const Raster<Tag>& single) {
  Tensor t(1, single.channels(), single.height(), single.width());
  for (std::size_t i = 0; i < single.size(); ++i) t[i] = single[i];
  return t;
}

template <class Tag>
inline Raster<Tag> from_tensor(const Tensor& t, int n) {
  check(n >= 0 && n < t.n(), "from_tensor: batch index out of range");
  Raster<Tag> r(t.h(), t.w(), t.c());
  const std::size_t stride = r.size();
  for (std::size_t i = 0; i < stride; ++i) r[i] = t[n * stride + i];
  return r;
}

inline ImagePatch patch_from_tensor(const Tensor& t, int n) {
  return from_tensor<ImageTag>(t, n);
}
inline NoiseMap noise_from_tensor(const Tensor& t, int n) {
  return from_tensor<NoiseTag>(t, n);
}

}  // namespace scgan

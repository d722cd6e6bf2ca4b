#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

#include "scgan/common.hpp"
#include "scgan/rng.hpp"
#include "scgan/tensor.hpp"

namespace scgan {

// Batch-statistics handling. Train updates running statistics;
// TrainFrozenStats normalizes with batch statistics but leaves the running
// estimates untouched (used when a network is re-applied inside one training
// step); Eval normalizes with the running estimates.
enum class Mode { Train, TrainFrozenStats, Eval };

// A named view into a layer's storage. `grad` is null for non-trainable
// state (batch-norm running statistics), which is checkpointed but never
// touched by the optimizer.
struct ArrayRef {
  std::string name;
  real* data = nullptr;
  std::size_t size = 0;
  real* grad = nullptr;
};

using MatRM =
    Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;

namespace detail {

// Writes sample n of x as a (C*k*k) x (Ho*Wo) row-major patch matrix.
inline void im2col(const Tensor& x, int n, int k, int stride, real* dst) {
  const int C = x.c(), H = x.h(), W = x.w();
  const int Ho = (H - k) / stride + 1;
  const int Wo = (W - k) / stride + 1;
  const real* base = x.data() + static_cast<std::size_t>(n) * C * H * W;
  real* d = dst;
  for (int c = 0; c < C; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        for (int ho = 0; ho < Ho; ++ho) {
          const real* src =
              base + (static_cast<std::size_t>(c) * H + ho * stride + ky) * W +
              kx;
          for (int wo = 0; wo < Wo; ++wo) d[wo] = src[wo * stride];
          d += Wo;
        }
      }
    }
  }
}

// Scatter-adds a patch matrix back onto sample n of grad_in.
inline void col2im_add(const real* src, int C, int H, int W, int k, int stride,
                       real* dst_sample) {
  const int Ho = (H - k) / stride + 1;
  const int Wo = (W - k) / stride + 1;
  const real* s = src;
  for (int c = 0; c < C; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        for (int ho = 0; ho < Ho; ++ho) {
          real* d = dst_sample +
                    (static_cast<std::size_t>(c) * H + ho * stride + ky) * W +
                    kx;
          for (int wo = 0; wo < Wo; ++wo) d[wo * stride] += s[wo];
          s += Wo;
        }
      }
    }
  }
}

}  // namespace detail

struct Conv2dCtx {
  Tensor input;
};

// Valid (unpadded) convolution; spatial padding is a separate layer.
class Conv2d {
 public:
  Conv2d(int in_ch, int out_ch, int kernel, int stride = 1)
      : in_ch_(in_ch), out_ch_(out_ch), k_(kernel), stride_(stride),
        weight_(out_ch, in_ch, kernel, kernel),
        grad_weight_(out_ch, in_ch, kernel, kernel),
        bias_(out_ch, 0.0), grad_bias_(out_ch, 0.0) {
    check(in_ch >= 1 && out_ch >= 1, "Conv2d: channel counts must be >= 1");
    check(kernel >= 1 && stride >= 1, "Conv2d: kernel and stride must be >= 1");
  }

  int in_channels() const { return in_ch_; }
  int out_channels() const { return out_ch_; }
  int kernel() const { return k_; }
  int stride() const { return stride_; }
  std::size_t parameter_count() const { return weight_.size() + bias_.size(); }

  int out_extent(int in_extent) const {
    return (in_extent - k_) / stride_ + 1;
  }

  void init_he(Rng& rng) {
    const real fan_in = static_cast<real>(in_ch_) * k_ * k_;
    const real stddev = std::sqrt(2.0 / fan_in);
    for (auto& w : weight_.values()) w = stddev * rng.normal();
    for (auto& b : bias_) b = 0.0;
  }

  void init_zero() {
    weight_.fill(0.0);
    for (auto& b : bias_) b = 0.0;
  }

  Tensor forward(const Tensor& x, Conv2dCtx& ctx) const {
    check(x.c() == in_ch_, "Conv2d: input channel mismatch");
    check(x.h() >= k_ && x.w() >= k_, "Conv2d: input smaller than kernel");
    const int Ho = out_extent(x.h());
    const int Wo = out_extent(x.w());
    ctx.input = x;

    Tensor y(x.n(), out_ch_, Ho, Wo);
    const int ckk = in_ch_ * k_ * k_;
    const int cols = Ho * Wo;
    std::vector<real> col(static_cast<std::size_t>(ckk) * cols);
    CMapRM Wm(weight_.data(), out_ch_, ckk);
    for (int n = 0; n < x.n(); ++n) {
      detail::im2col(x, n, k_, stride_, col.data());
      CMapRM M(col.data(), ckk, cols);
      MapRM Yn(y.data() + static_cast<std::size_t>(n) * out_ch_ * cols,
               out_ch_, cols);
      Yn.noalias() = Wm * M;
    }
    for (int n = 0; n < y.n(); ++n) {
      for (int oc = 0; oc < out_ch_; ++oc) {
        real* plane =
            y.data() + (static_cast<std::size_t>(n) * out_ch_ + oc) * cols;
        for (int i = 0; i < cols; ++i) plane[i] += bias_[oc];
      }
    }
    return y;
  }

  // Accumulates parameter gradients and returns the input gradient.
  Tensor backward(const Tensor& grad_out, const Conv2dCtx& ctx) {
    const Tensor& x = ctx.input;
    check(grad_out.c() == out_ch_, "Conv2d backward: channel mismatch");
    const int Ho = out_extent(x.h());
    const int Wo = out_extent(x.w());
    check(grad_out.h() == Ho && grad_out.w() == Wo && grad_out.n() == x.n(),
          "Conv2d backward: gradient shape mismatch");

    Tensor gin(x.n(), x.c(), x.h(), x.w());
    const int ckk = in_ch_ * k_ * k_;
    const int cols = Ho * Wo;
    std::vector<real> col(static_cast<std::size_t>(ckk) * cols);
    std::vector<real> gcol(static_cast<std::size_t>(ckk) * cols);
    CMapRM Wm(weight_.data(), out_ch_, ckk);
    MapRM GW(grad_weight_.data(), out_ch_, ckk);
    for (int n = 0; n < x.n(); ++n) {
      detail::im2col(x, n, k_, stride_, col.data());
      CMapRM M(col.data(), ckk, cols);
      CMapRM Gm(grad_out.data() + static_cast<std::size_t>(n) * out_ch_ * cols,
                out_ch_, cols);
      GW.noalias() += Gm * M.transpose();
      MapRM Gc(gcol.data(), ckk, cols);
      Gc.noalias() = Wm.transpose() * Gm;
      detail::col2im_add(gcol.data(), in_ch_, x.h(), x.w(), k_, stride_,
                         gin.data() +
                             static_cast<std::size_t>(n) * in_ch_ * x.h() *
                                 x.w());
    }
    for (int n = 0; n < grad_out.n(); ++n) {
      for (int oc = 0; oc < out_ch_; ++oc) {
        const real* plane = grad_out.data() +
                            (static_cast<std::size_t>(n) * out_ch_ + oc) * cols;
        real s = 0.0;
        for (int i = 0; i < cols; ++i) s += plane[i];
        grad_bias_[oc] += s;
      }
    }
    return gin;
  }

  void append_arrays(const std::string& prefix, std::vector<ArrayRef>& out) {
    out.push_back({prefix + ".weight", weight_.data(), weight_.size(),
                   grad_weight_.data()});
    out.push_back({prefix + ".bias", bias_.data(), bias_.size(),
                   grad_bias_.data()});
  }

  Tensor& weight() { return weight_; }
  const Tensor& weight() const { return weight_; }
  std::vector<real>& bias() { return bias_; }

 private:
  int in_ch_, out_ch_, k_, stride_;
  Tensor weight_, grad_weight_;
  std::vector<real> bias_, grad_bias_;
};

struct BatchNormCtx {
  Mode mode = Mode::Train;
  Tensor x_hat;
  std::vector<real> inv_std;
};

class BatchNorm2d {
 public:
  explicit BatchNorm2d(int channels, real eps = 1e-5, real momentum = 0.1)
      : c_(channels), eps_(eps), momentum_(momentum),
        gamma_(channels, 1.0), beta_(channels, 0.0),
        grad_gamma_(channels, 0.0), grad_beta_(channels, 0.0),
        running_mean_(channels, 0.0), running_var_(channels, 1.0) {
    check(channels >= 1, "BatchNorm2d: channels must be >= 1");
  }

  int channels() const { return c_; }
  std::size_t parameter_count() const { return 2 * static_cast<std::size_t>(c_); }

  Tensor forward(const Tensor& x, Mode mode, BatchNormCtx& ctx) {
    check(x.c() == c_, "BatchNorm2d: channel mismatch");
    ctx.mode = mode;
    const int plane = x.h() * x.w();
    Tensor y(x.n(), x.c(), x.h(), x.w());

    if (mode == Mode::Eval) {
      for (int c = 0; c < c_; ++c) {
        const real inv = 1.0 / std::sqrt(running_var_[c] + eps_);
        for (int n = 0; n < x.n(); ++n) {
          const std::size_t off = (static_cast<std::size_t>(n) * c_ + c) * plane;
          for (int i = 0; i < plane; ++i) {
            y[off + i] = gamma_[c] * ((x[off + i] - running_mean_[c]) * inv) +
                         beta_[c];
          }
        }
      }
      return y;
    }

    const std::size_t m = static_cast<std::size_t>(x.n()) * plane;
    check(m > 1, "BatchNorm2d: batch statistics need more than one value per channel");
    ctx.x_hat = Tensor(x.n(), x.c(), x.h(), x.w());
    ctx.inv_std.assign(c_, 0.0);
    for (int c = 0; c < c_; ++c) {
      real sum = 0.0;
      for (int n = 0; n < x.n(); ++n) {
        const std::size_t off = (static_cast<std::size_t>(n) * c_ + c) * plane;
        for (int i = 0; i < plane; ++i) sum += x[off + i];
      }
      const real mu = sum / static_cast<real>(m);
      real ss = 0.0;
      for (int n = 0; n < x.n(); ++n) {
        const std::size_t off = (static_cast<std::size_t>(n) * c_ + c) * plane;
        for (int i = 0; i < plane; ++i) {
          const real d = x[off + i] - mu;
          ss += d * d;
        }
      }
      const real var = ss / static_cast<real>(m);
      const real inv = 1.0 / std::sqrt(var + eps_);
      ctx.inv_std[c] = inv;
      for (int n = 0; n < x.n(); ++n) {
        const std::size_t off = (static_cast<std::size_t>(n) * c_ + c) * plane;
        for (int i = 0; i < plane; ++i) {
          const real xh = (x[off + i] - mu) * inv;
          ctx.x_hat[off + i] = xh;
          y[off + i] = gamma_[c] * xh + beta_[c];
        }
      }
      if (mode == Mode::Train) {
        const real unbiased = var * static_cast<real>(m) /
                              static_cast<real>(m - 1);
        running_mean_[c] = (1.0 - momentum_) * running_mean_[c] + momentum_ * mu;
        running_var_[c] = (1.0 - momentum_) * running_var_[c] +
                          momentum_ * unbiased;
      }
    }
    return y;
  }

  // Backward through batch-statistics normalization. Eval-mode contexts are
  // rejected; nothing in training differentiates through running statistics.
  Tensor backward(const Tensor& grad_out, const BatchNormCtx& ctx) {
    check(ctx.mode != Mode::Eval,
          "BatchNorm2d backward: eval-mode context is not differentiable here");
    const Tensor& xh = ctx.x_hat;
    check(grad_out.same_shape(xh), "BatchNorm2d backward: shape mismatch");
    const int plane = xh.h() * xh.w();
    const real m = static_cast<real>(static_cast<std::size_t>(xh.n()) * plane);

    Tensor gin(xh.n(), xh.c(), xh.h(), xh.w());
    for (int c = 0; c < c_; ++c) {
      real sum_g = 0.0, sum_gx = 0.0;
      for (int n = 0; n < xh.n(); ++n) {
        const std::size_t off = (static_cast<std::size_t>(n) * c_ + c) * plane;
        for (int i = 0; i < plane; ++i) {
          sum_g += grad_out[off + i];
          sum_gx += grad_out[off + i] * xh[off + i];
        }
      }
      grad_gamma_[c] += sum_gx;
      grad_beta_[c] += sum_g;
      const real scale = gamma_[c] * ctx.inv_std[c] / m;
      for (int n = 0; n < xh.n(); ++n) {
        const std::size_t off = (static_cast<std::size_t>(n) * c_ + c) * plane;
        for (int i = 0; i < plane; ++i) {
          gin[off + i] = scale * (m * grad_out[off + i] - sum_g -
                                  xh[off + i] * sum_gx);
        }
      }
    }
    return gin;
  }

  void append_arrays(const std::string& prefix, std::vector<ArrayRef>& out) {
    out.push_back({prefix + ".gamma", gamma_.data(), gamma_.size(),
                   grad_gamma_.data()});
    out.push_back({prefix + ".beta", beta_.data(), beta_.size(),
                   grad_beta_.data()});
    out.push_back({prefix + ".running_mean", running_mean_.data(),
                   running_mean_.size(), nullptr});
    out.push_back({prefix + ".running_var", running_var_.data(),
                   running_var_.size(), nullptr});
  }

  std::vector<real>& gamma() { return gamma_; }
  std::vector<real>& beta() { return beta_; }
  const std::vector<real>& running_mean() const { return running_mean_; }
  const std::vector<real>& running_var() const { return running_var_; }

 private:
  int c_;
  real eps_, momentum_;
  std::vector<real> gamma_, beta_, grad_gamma_, grad_beta_;
  std::vector<real> running_mean_, running_var_;
};

struct ActivationCtx {
  std::vector<std::uint8_t> positive;
};

// slope 0 is plain ReLU.
class LeakyReLU {
 public:
  explicit LeakyReLU(real slope = 0.0) : slope_(slope) {
    check(slope >= 0.0 && slope < 1.0, "LeakyReLU: slope must be in [0, 1)");
  }

  real slope() const { return slope_; }

  Tensor forward(const Tensor& x, ActivationCtx& ctx) const {
    Tensor y = x;
    ctx.positive.assign(x.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > 0.0) {
        ctx.positive[i] = 1;
      } else {
        y[i] = slope_ * x[i];
      }
    }
    return y;
  }

  Tensor backward(const Tensor& grad_out, const ActivationCtx& ctx) const {
    check(grad_out.size() == ctx.positive.size(),
          "LeakyReLU backward: shape mismatch");
    Tensor gin = grad_out;
    for (std::size_t i = 0; i < gin.size(); ++i) {
      if (!ctx.positive[i]) gin[i] *= slope_;
    }
    return gin;
  }

 private:
  real slope_;
};

// Reflection padding without edge repetition: index -1 maps to 1 and index
// H maps to H-2, so pad must stay below the spatial extent.
class ReflectionPad {
 public:
  explicit ReflectionPad(int pad) : pad_(pad) {
    check(pad >= 0, "ReflectionPad: pad must be >= 0");
  }

  int pad() const { return pad_; }

  static int reflect(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
  }

  Tensor forward(const Tensor& x) const {
    check(pad_ <= x.h() - 1 && pad_ <= x.w() - 1,
          "ReflectionPad: pad must be smaller than the spatial extent");
    Tensor y(x.n(), x.c(), x.h() + 2 * pad_, x.w() + 2 * pad_);
    for (int n = 0; n < x.n(); ++n) {
      for (int c = 0; c < x.c(); ++c) {
        for (int yy = 0; yy < y.h(); ++yy) {
          const int sy = reflect(yy - pad_, x.h());
          for (int xx = 0; xx < y.w(); ++xx) {
            y.at(n, c, yy, xx) = x.at(n, c, sy, reflect(xx - pad_, x.w()));
          }
        }
      }
    }
    return y;
  }

  Tensor backward(const Tensor& grad_out, int in_h, int in_w) const {
    check(grad_out.h() == in_h + 2 * pad_ && grad_out.w() == in_w + 2 * pad_,
          "ReflectionPad backward: shape mismatch");
    Tensor gin(grad_out.n(), grad_out.c(), in_h, in_w);
    for (int n = 0; n < grad_out.n(); ++n) {
      for (int c = 0; c < grad_out.c(); ++c) {
        for (int yy = 0; yy < grad_out.h(); ++yy) {
          const int sy = reflect(yy - pad_, in_h);
          for (int xx = 0; xx < grad_out.w(); ++xx) {
            gin.at(n, c, sy, reflect(xx - pad_, in_w)) +=
                grad_out.at(n, c, yy, xx);
          }
        }
      }
    }
    return gin;
  }

 private:
  int pad_;
};

inline void zero_grads(std::vector<ArrayRef>& arrays) {
  for (auto& a : arrays) {
    if (!a.grad) continue;
    for (std::size_t i = 0; i < a.size; ++i) a.grad[i] = 0.0;
  }
}

}  // namespace scgan

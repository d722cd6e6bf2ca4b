#pragma once

#include <string>
#include <vector>

#include "scgan/common.hpp"
#include "scgan/layers.hpp"
#include "scgan/rng.hpp"
#include "scgan/tensor.hpp"

namespace scgan {

// Noise-extraction generator: reflection-pad once, then `depth` valid 3x3
// convolutions (conv+ReLU, depth-2 times conv+BN+ReLU, plain conv). Padding
// must equal depth*(kernel-1)/2 so the stack returns the input size; with the
// fixed 3x3 kernel that means padding == depth.
struct GeneratorConfig {
  int depth = 17;
  int mid_channels = 64;
  int kernel = 3;
  int in_channels = 1;
  int padding = 17;

  void validate() const {
    std::vector<std::string> violations;
    if (depth < 2) violations.push_back("depth must be >= 2");
    if (mid_channels < 1) violations.push_back("mid_channels must be >= 1");
    if (kernel < 1 || kernel % 2 == 0)
      violations.push_back("kernel must be odd and >= 1");
    if (in_channels != 1 && in_channels != 3)
      violations.push_back("in_channels must be 1 or 3");
    if (2 * padding != depth * (kernel - 1))
      violations.push_back(
          "padding must equal depth*(kernel-1)/2 so output size matches input "
          "size");
    if (!violations.empty())
      throw ConfigError("invalid generator config", violations);
  }

  std::size_t parameter_count() const {
    const std::size_t kk = static_cast<std::size_t>(kernel) * kernel;
    std::size_t total = (static_cast<std::size_t>(in_channels) * kk + 1) *
                        mid_channels;
    const std::size_t mid =
        (static_cast<std::size_t>(mid_channels) * kk + 1) * mid_channels +
        2 * static_cast<std::size_t>(mid_channels);
    total += static_cast<std::size_t>(depth - 2) * mid;
    total += static_cast<std::size_t>(mid_channels) * kk * in_channels +
             in_channels;
    return total;
  }
};

struct GeneratorCtx {
  int in_h = 0, in_w = 0;
  std::vector<Conv2dCtx> conv;
  std::vector<BatchNormCtx> bn;
  std::vector<ActivationCtx> act;
};

class Generator {
 public:
  explicit Generator(const GeneratorConfig& cfg, Rng& rng) : cfg_(cfg) {
    cfg.validate();
    pad_ = ReflectionPad(cfg.padding);
    convs_.reserve(cfg.depth);
    convs_.emplace_back(cfg.in_channels, cfg.mid_channels, cfg.kernel);
    for (int i = 1; i < cfg.depth - 1; ++i) {
      convs_.emplace_back(cfg.mid_channels, cfg.mid_channels, cfg.kernel);
      bns_.emplace_back(cfg.mid_channels);
    }
    convs_.emplace_back(cfg.mid_channels, cfg.in_channels, cfg.kernel);
    for (int i = 0; i < cfg.depth - 1; ++i) convs_[i].init_he(rng);
    // Zero final layer: a fresh generator maps everything to the zero noise
    // map, which satisfies all three self-consistency targets exactly.
    convs_.back().init_zero();
  }

  const GeneratorConfig& config() const { return cfg_; }

  std::size_t parameter_count() const { return cfg_.parameter_count(); }

  Tensor forward(const Tensor& x, Mode mode, GeneratorCtx& ctx) {
    check(x.c() == cfg_.in_channels, "Generator: input channel mismatch");
    ctx.in_h = x.h();
    ctx.in_w = x.w();
    ctx.conv.assign(convs_.size(), {});
    ctx.bn.assign(bns_.size(), {});
    ctx.act.assign(convs_.size() - 1, {});

    Tensor h = pad_.forward(x);
    h = convs_[0].forward(h, ctx.conv[0]);
    h = relu_.forward(h, ctx.act[0]);
    for (std::size_t i = 1; i + 1 < convs_.size(); ++i) {
      h = convs_[i].forward(h, ctx.conv[i]);
      h = bns_[i - 1].forward(h, mode, ctx.bn[i - 1]);
      h = relu_.forward(h, ctx.act[i]);
    }
    h = convs_.back().forward(h, ctx.conv.back());
    check(h.h() == x.h() && h.w() == x.w() && h.c() == x.c(),
          "Generator: output shape does not match input shape");
    return h;
  }

  Tensor forward(const Tensor& x, Mode mode = Mode::Eval) {
    GeneratorCtx scratch;
    return forward(x, mode, scratch);
  }

  // Accumulates parameter gradients and returns the gradient with respect to
  // the generator input, so applications of G can be chained.
  Tensor backward(const Tensor& grad_out, const GeneratorCtx& ctx) {
    Tensor g = convs_.back().backward(grad_out, ctx.conv.back());
    for (std::size_t i = convs_.size() - 1; i-- > 1;) {
      g = relu_.backward(g, ctx.act[i]);
      g = bns_[i - 1].backward(g, ctx.bn[i - 1]);
      g = convs_[i].backward(g, ctx.conv[i]);
    }
    g = relu_.backward(g, ctx.act[0]);
    g = convs_[0].backward(g, ctx.conv[0]);
    return pad_.backward(g, ctx.in_h, ctx.in_w);
  }

  std::vector<ArrayRef> arrays(const std::string& prefix) {
    std::vector<ArrayRef> out;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      convs_[i].append_arrays(prefix + ".conv" + std::to_string(i + 1), out);
      if (i >= 1 && i + 1 < convs_.size()) {
        bns_[i - 1].append_arrays(prefix + ".bn" + std::to_string(i + 1), out);
      }
    }
    return out;
  }

  std::vector<Conv2d>& convs() { return convs_; }
  std::vector<BatchNorm2d>& bns() { return bns_; }

 private:
  GeneratorConfig cfg_;
  ReflectionPad pad_{0};
  std::vector<Conv2d> convs_;
  std::vector<BatchNorm2d> bns_;
  LeakyReLU relu_{0.0};
};

}  // namespace scgan

#pragma once

#include <array>
#include <string>
#include <vector>

#include "scgan/common.hpp"
#include "scgan/layers.hpp"
#include "scgan/rng.hpp"
#include "scgan/tensor.hpp"

namespace scgan {

// Patch discriminator: exactly four valid convolutions, leaky ReLU after the
// first three, raw scores out of the last. Defaults follow the reference
// architecture; smaller kernel/stride sets are allowed for tiny test inputs.
struct DiscriminatorConfig {
  int in_channels = 1;
  std::array<int, 4> channels{64, 128, 64, 1};
  std::array<int, 4> kernels{5, 5, 3, 3};
  std::array<int, 4> strides{2, 2, 1, 1};
  real leaky_slope = 0.2;

  void validate() const {
    std::vector<std::string> violations;
    if (in_channels != 1 && in_channels != 3)
      violations.push_back("in_channels must be 1 or 3");
    for (int i = 0; i < 4; ++i) {
      if (channels[i] < 1)
        violations.push_back("channels[" + std::to_string(i) +
                             "] must be >= 1");
      if (kernels[i] < 1)
        violations.push_back("kernels[" + std::to_string(i) +
                             "] must be >= 1");
      if (strides[i] < 1)
        violations.push_back("strides[" + std::to_string(i) +
                             "] must be >= 1");
    }
    if (channels[3] != 1)
      violations.push_back("final layer must emit a single score channel");
    if (leaky_slope < 0.0 || leaky_slope >= 1.0)
      violations.push_back("leaky_slope must be in [0, 1)");
    if (!violations.empty())
      throw ConfigError("invalid discriminator config", violations);
  }

  // Smallest square input for which every layer's output is nonempty.
  int min_input_extent() const {
    int needed = 1;
    for (int i = 3; i >= 0; --i) {
      needed = (needed - 1) * strides[i] + kernels[i];
    }
    return needed;
  }

  // Score-map extent for a given input extent; throws when some layer
  // would be smaller than its kernel.
  int out_extent(int in_extent) const {
    int n = in_extent;
    for (int i = 0; i < 4; ++i) {
      if (n < kernels[i]) {
        throw Error("discriminator input too small: layer " +
                    std::to_string(i + 1) + " would see extent " +
                    std::to_string(n) + " < kernel " +
                    std::to_string(kernels[i]) + "; minimum input is " +
                    std::to_string(min_input_extent()));
      }
      n = (n - kernels[i]) / strides[i] + 1;
    }
    return n;
  }
};

struct DiscriminatorCtx {
  std::array<Conv2dCtx, 4> conv;
  std::array<ActivationCtx, 3> act;
};

class Discriminator {
 public:
  explicit Discriminator(const DiscriminatorConfig& cfg, Rng& rng)
      : cfg_(cfg), act_(cfg.leaky_slope) {
    cfg.validate();
    int in_ch = cfg.in_channels;
    convs_.reserve(4);
    for (int i = 0; i < 4; ++i) {
      convs_.emplace_back(in_ch, cfg.channels[i], cfg.kernels[i],
                          cfg.strides[i]);
      convs_.back().init_he(rng);
      in_ch = cfg.channels[i];
    }
  }

  const DiscriminatorConfig& config() const { return cfg_; }

  std::size_t parameter_count() const {
    std::size_t total = 0;
    for (const auto& c : convs_) total += c.parameter_count();
    return total;
  }

  Tensor forward(const Tensor& x, DiscriminatorCtx& ctx) {
    check(x.c() == cfg_.in_channels, "Discriminator: input channel mismatch");
    cfg_.out_extent(x.h());
    cfg_.out_extent(x.w());
    Tensor h = x;
    for (int i = 0; i < 4; ++i) {
      h = convs_[i].forward(h, ctx.conv[i]);
      if (i < 3) h = act_.forward(h, ctx.act[i]);
    }
    return h;
  }

  Tensor forward(const Tensor& x) {
    DiscriminatorCtx scratch;
    return forward(x, scratch);
  }

  // Accumulates parameter gradients and returns the input gradient, which is
  // how adversarial gradient reaches the generator.
  Tensor backward(const Tensor& grad_out, const DiscriminatorCtx& ctx) {
    Tensor g = convs_[3].backward(grad_out, ctx.conv[3]);
    for (int i = 2; i >= 0; --i) {
      g = act_.backward(g, ctx.act[i]);
      g = convs_[i].backward(g, ctx.conv[i]);
    }
    return g;
  }

  std::vector<ArrayRef> arrays(const std::string& prefix) {
    std::vector<ArrayRef> out;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      convs_[i].append_arrays(prefix + ".conv" + std::to_string(i + 1), out);
    }
    return out;
  }

  std::vector<Conv2d>& convs() { return convs_; }

 private:
  DiscriminatorConfig cfg_;
  std::vector<Conv2d> convs_;
  LeakyReLU act_;
};

}  // namespace scgan

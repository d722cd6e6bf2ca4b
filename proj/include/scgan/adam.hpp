#pragma once

#include <cstdint>
#include <vector>

#include "scgan/common.hpp"
#include "scgan/layers.hpp"

namespace scgan {

struct AdamConfig {
  real lr = 1e-4;
  real beta1 = 0.5;
  real beta2 = 0.999;
  real eps = 1e-8;
};

// Adaptive-moment optimizer over a fixed set of parameter arrays. Moment
// buffers are laid out in the order the arrays were given, which is also the
// checkpoint order.
class Adam {
 public:
  Adam(const AdamConfig& cfg, std::vector<ArrayRef> arrays) : cfg_(cfg) {
    check(cfg.lr > 0.0, "Adam: learning rate must be positive");
    check(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 &&
              cfg.beta2 < 1.0,
          "Adam: betas must be in [0, 1)");
    std::size_t total = 0;
    for (auto& a : arrays) {
      if (!a.grad) continue;
      params_.push_back(a);
      total += a.size;
    }
    m_.assign(total, 0.0);
    v_.assign(total, 0.0);
  }

  void step() {
    ++t_;
    const real bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<real>(t_));
    const real bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<real>(t_));
    std::size_t off = 0;
    for (auto& p : params_) {
      for (std::size_t i = 0; i < p.size; ++i) {
        const real g = p.grad[i];
        real& m = m_[off + i];
        real& v = v_[off + i];
        m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
        v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
        p.data[i] -= cfg_.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg_.eps);
      }
      off += p.size;
    }
  }

  void zero_grads() {
    for (auto& p : params_) {
      for (std::size_t i = 0; i < p.size; ++i) p.grad[i] = 0.0;
    }
  }

  const AdamConfig& config() const { return cfg_; }
  std::uint64_t steps_taken() const { return t_; }
  std::vector<real>& moment1() { return m_; }
  std::vector<real>& moment2() { return v_; }
  void set_steps_taken(std::uint64_t t) { t_ = t; }

 private:
  AdamConfig cfg_;
  std::vector<ArrayRef> params_;
  std::vector<real> m_, v_;
  std::uint64_t t_ = 0;
};

}  // namespace scgan

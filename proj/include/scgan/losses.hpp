#pragma once

#include <utility>

#include "scgan/common.hpp"
#include "scgan/tensor.hpp"

namespace scgan {

// One training step's loss components. Every entry is a mean of squares, so
// all are non-negative.
struct LossBreakdown {
  real l_gan_d = 0.0;
  real l_gan_g = 0.0;
  real l_clean = 0.0;
  real l_pn = 0.0;
  real l_rec = 0.0;
  real total_g = 0.0;
};

// Least-squares adversarial objectives over raw score maps: the
// discriminator pushes real scores to 1 and fake scores to 0, the generator
// pushes fake scores to 1.
inline std::pair<real, real> adversarial_losses(const Tensor& d_real,
                                                const Tensor& d_fake) {
  check(d_real.all_finite() && d_fake.all_finite(),
        "adversarial_losses: non-finite score map");
  const real l_d = mean_squared_vs(d_real, 1.0) + mean_squared_vs(d_fake, 0.0);
  const real l_g = mean_squared_vs(d_fake, 1.0);
  return {l_d, l_g};
}

// Mean squared response of the generator on a clean image; zero response is
// the target.
inline real clean_consistency_loss(const Tensor& g_on_clean) {
  return g_on_clean.mean_sq();
}

// g_second = G(g_first): extracting noise from a pure noise map should
// return the same map.
inline real pure_noise_consistency_loss(const Tensor& g_first,
                                        const Tensor& g_second) {
  check(g_first.same_shape(g_second),
        "pure_noise_consistency_loss: shape mismatch");
  return mean_squared_diff(g_second, g_first);
}

// g_reextracted = G(clean + g_original): re-extracting noise injected into a
// clean image should recover the injected map.
inline real reconstruction_consistency_loss(const Tensor& g_reextracted,
                                            const Tensor& g_original) {
  check(g_reextracted.same_shape(g_original),
        "reconstruction_consistency_loss: shape mismatch");
  return mean_squared_diff(g_reextracted, g_original);
}

inline real total_generator_objective(const LossBreakdown& b, real w1, real w2,
                                      real w3) {
  check(w1 >= 0.0 && w2 >= 0.0 && w3 >= 0.0,
        "total_generator_objective: weights must be non-negative");
  return b.l_gan_g + w1 * b.l_clean + w2 * b.l_pn + w3 * b.l_rec;
}

}  // namespace scgan

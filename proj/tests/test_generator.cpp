#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "scgan/generator.hpp"
#include "scgan/rng.hpp"

namespace scgan {
namespace {

GeneratorConfig small_config(int depth, int mid = 4, int kernel = 3,
                             int channels = 1) {
  GeneratorConfig cfg;
  cfg.depth = depth;
  cfg.mid_channels = mid;
  cfg.kernel = kernel;
  cfg.in_channels = channels;
  cfg.padding = depth * (kernel - 1) / 2;
  return cfg;
}

Tensor random_input(int n, int c, int extent, std::uint64_t seed) {
  Rng rng(seed);
  Tensor x(n, c, extent, extent);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.normal(0.0, 0.3);
  return x;
}

TEST(Generator, OutputShapeMatchesInputAcrossDepths) {
  for (int depth : {3, 5, 7, 17}) {
    Rng rng(1);
    Generator g(small_config(depth, 6), rng);
    const Tensor x = random_input(2, 1, 24, 2);
    const Tensor y = g.forward(x, Mode::Eval);
    EXPECT_EQ(y.n(), x.n()) << "depth " << depth;
    EXPECT_EQ(y.c(), x.c()) << "depth " << depth;
    EXPECT_EQ(y.h(), x.h()) << "depth " << depth;
    EXPECT_EQ(y.w(), x.w()) << "depth " << depth;
  }
}

TEST(Generator, ThreeChannelInputsKeepShape) {
  Rng rng(3);
  Generator g(small_config(3, 4, 3, 3), rng);
  const Tensor x = random_input(1, 3, 16, 4);
  const Tensor y = g.forward(x, Mode::Eval);
  EXPECT_EQ(y.c(), 3);
  EXPECT_EQ(y.h(), 16);
  EXPECT_EQ(y.w(), 16);
}

TEST(Generator, ReferenceConfigParameterCount) {
  GeneratorConfig cfg;  // depth 17, 64 mid channels, 3x3 kernels, 1 channel
  EXPECT_EQ(cfg.parameter_count(), 557057u);

  Rng rng(5);
  Generator g(cfg, rng);
  std::size_t trainable = 0;
  for (const auto& a : g.arrays("g"))
    if (a.grad) trainable += a.size;
  EXPECT_EQ(trainable, 557057u);
}

TEST(Generator, FreshModelPredictsExactlyZeroNoise) {
  // The final conv starts at zero, so an untrained model reports a clean
  // image for any input instead of injecting random structure.
  Rng rng(7);
  Generator g(small_config(5, 8), rng);
  const Tensor x = random_input(2, 1, 20, 8);
  for (Mode mode : {Mode::Eval, Mode::Train, Mode::TrainFrozenStats}) {
    GeneratorCtx ctx;
    const Tensor y = g.forward(x, mode, ctx);
    for (std::size_t i = 0; i < y.size(); ++i)
      ASSERT_DOUBLE_EQ(y[i], 0.0);
  }
}

TEST(Generator, SameSeedGivesIdenticalModels) {
  Rng ra(11), rb(11);
  Generator a(small_config(3), ra), b(small_config(3), rb);
  const Tensor x = random_input(1, 1, 12, 12);
  const Tensor ya = a.forward(x, Mode::Eval);
  const Tensor yb = b.forward(x, Mode::Eval);
  for (std::size_t i = 0; i < ya.size(); ++i)
    ASSERT_DOUBLE_EQ(ya[i], yb[i]);
}

TEST(GeneratorConfig, RejectsInvalidShapes) {
  EXPECT_THROW(small_config(1).validate(), ConfigError);
  GeneratorConfig even = small_config(3);
  even.kernel = 4;
  EXPECT_THROW(even.validate(), ConfigError);
  GeneratorConfig pad = small_config(17);
  pad.padding = 16;
  EXPECT_THROW(pad.validate(), ConfigError);
  GeneratorConfig chans = small_config(3);
  chans.in_channels = 2;
  EXPECT_THROW(chans.validate(), ConfigError);
  EXPECT_NO_THROW(small_config(17).validate());
}

TEST(Generator, GradientsMatchFiniteDifferences) {
  Rng rng(13);
  Generator g(small_config(3, 3), rng);
  // Kick the zero-initialized output conv off its fixed point so the
  // mean-square loss has generic gradients everywhere.
  auto arrays = g.arrays("g");
  Rng noise(14);
  for (auto& a : arrays)
    if (a.name.find("conv3.weight") != std::string::npos)
      for (std::size_t i = 0; i < a.size; ++i) a.data[i] = noise.normal(0.0, 0.2);

  Tensor x = random_input(2, 1, 8, 15);
  auto eval = [&] {
    GeneratorCtx c;
    return g.forward(x, Mode::TrainFrozenStats, c).mean_sq();
  };

  GeneratorCtx ctx;
  const Tensor y = g.forward(x, Mode::TrainFrozenStats, ctx);
  Tensor grad = y;
  const real sc = 2.0 / static_cast<real>(y.size());
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = sc * y[i];
  zero_grads(arrays);
  const Tensor grad_in = g.backward(grad, ctx);

  const real step = 1e-5;
  auto check = [&](real* data, const real* analytic, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      const real keep = data[i];
      data[i] = keep + step;
      const real up = eval();
      data[i] = keep - step;
      const real down = eval();
      data[i] = keep;
      const real fd = (up - down) / (2.0 * step);
      const real denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-2});
      ASSERT_LT(std::abs(fd - analytic[i]) / denom, 1e-4)
          << "fd " << fd << " vs analytic " << analytic[i];
    }
  };
  for (auto& a : arrays) {
    if (!a.grad) continue;
    check(a.data, a.grad, a.size);
  }
  check(x.data(), grad_in.data(), x.size());
}

}  // namespace
}  // namespace scgan

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "scgan/adam.hpp"
#include "scgan/checkpoint.hpp"
#include "scgan/config.hpp"
#include "scgan/corpus.hpp"
#include "scgan/discriminator.hpp"
#include "scgan/generator.hpp"
#include "scgan/image.hpp"
#include "scgan/losses.hpp"
#include "scgan/rng.hpp"
#include "scgan/schedule.hpp"

namespace scgan {

struct MetricsRow {
  int epoch = 0;
  int step = 0;
  LossBreakdown losses;
  real w1 = 0.0, w2 = 0.0, w3 = 0.0;
};

inline std::string metrics_csv_header() {
  return "epoch,step,l_gan_d,l_gan_g,l_clean,l_pn,l_rec,total_g,w1,w2,w3";
}

// %.17g keeps doubles bit-exact through the log, so identical runs produce
// identical files.
inline std::string to_csv(const MetricsRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                r.epoch, r.step, r.losses.l_gan_d, r.losses.l_gan_g,
                r.losses.l_clean, r.losses.l_pn, r.losses.l_rec,
                r.losses.total_g, r.w1, r.w2, r.w3);
  return buf;
}

namespace detail {

inline void check_finite(real v, const char* component) {
  if (!std::isfinite(v))
    throw Error(std::string("non-finite loss component: ") + component);
}

}  // namespace detail

// Discriminator objective on one batch: real scores toward 1, fake scores
// toward 0. With backprop set, parameter gradients are accumulated.
inline real discriminator_objective(Discriminator& D, const Tensor& real_batch,
                                    const Tensor& fake_batch, bool backprop) {
  DiscriminatorCtx ctx_real, ctx_fake;
  const Tensor d_real = D.forward(real_batch, ctx_real);
  const Tensor d_fake = D.forward(fake_batch, ctx_fake);
  const auto [l_d, l_g_unused] = adversarial_losses(d_real, d_fake);
  (void)l_g_unused;
  detail::check_finite(l_d, "l_gan_d");
  if (backprop) {
    Tensor grad_real = d_real;
    const real inv_r = 2.0 / static_cast<real>(d_real.size());
    for (std::size_t i = 0; i < grad_real.size(); ++i)
      grad_real[i] = inv_r * (d_real[i] - 1.0);
    D.backward(grad_real, ctx_real);

    Tensor grad_fake = d_fake;
    const real inv_f = 2.0 / static_cast<real>(d_fake.size());
    for (std::size_t i = 0; i < grad_fake.size(); ++i)
      grad_fake[i] = inv_f * d_fake[i];
    D.backward(grad_fake, ctx_fake);
  }
  return l_d;
}

// Generator-side losses given a precomputed primary pass g1 = G(noisy).
// With backprop set, accumulates gradients of
//   w_gan*l_gan_g + w1*l_clean + w2*l_pn + w3*l_rec
// into G's parameter gradients (and incidentally into D's, which the next
// discriminator update zeroes). The consistency target is g1 held constant:
// gradients flow through every G application on the argument side but not
// into the target. Zero-weight components are skipped and reported as 0.
// frozen_target substitutes a fixed target tensor; finite-difference checks
// need the target pinned while parameters move.
inline LossBreakdown generator_losses_given(
    Generator& G, Discriminator& D, const Tensor& noisy, const Tensor& clean,
    const Tensor& g1, const GeneratorCtx& ctx1, real w_gan, real w1, real w2,
    real w3, bool backprop, const Tensor* frozen_target = nullptr) {
  check(w_gan >= 0.0 && w1 >= 0.0 && w2 >= 0.0 && w3 >= 0.0,
        "generator_losses: weights must be non-negative");
  const Tensor& target = frozen_target ? *frozen_target : g1;
  check(target.same_shape(g1), "generator_losses: target shape mismatch");

  LossBreakdown b;
  Tensor grad_g1(g1.n(), g1.c(), g1.h(), g1.w());
  bool grad_g1_used = false;

  if (w_gan > 0.0) {
    const Tensor fake = noisy - g1;
    DiscriminatorCtx ctx_d;
    const Tensor d_fake = D.forward(fake, ctx_d);
    b.l_gan_g = mean_squared_vs(d_fake, 1.0);
    detail::check_finite(b.l_gan_g, "l_gan_g");
    if (backprop) {
      Tensor grad_score = d_fake;
      const real s = w_gan * 2.0 / static_cast<real>(d_fake.size());
      for (std::size_t i = 0; i < grad_score.size(); ++i)
        grad_score[i] = s * (d_fake[i] - 1.0);
      const Tensor grad_fake = D.backward(grad_score, ctx_d);
      axpy(-1.0, grad_fake, grad_g1);
      grad_g1_used = true;
    }
  }

  if (w1 > 0.0) {
    GeneratorCtx ctx_c;
    const Tensor g_clean = G.forward(clean, Mode::TrainFrozenStats, ctx_c);
    b.l_clean = clean_consistency_loss(g_clean);
    detail::check_finite(b.l_clean, "l_clean");
    if (backprop) {
      Tensor grad = g_clean;
      const real s = w1 * 2.0 / static_cast<real>(g_clean.size());
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = s * g_clean[i];
      G.backward(grad, ctx_c);
    }
  }

  if (w2 > 0.0) {
    GeneratorCtx ctx_2;
    const Tensor g2 = G.forward(g1, Mode::TrainFrozenStats, ctx_2);
    b.l_pn = pure_noise_consistency_loss(target, g2);
    detail::check_finite(b.l_pn, "l_pn");
    if (backprop) {
      Tensor grad = g2;
      const real s = w2 * 2.0 / static_cast<real>(g2.size());
      for (std::size_t i = 0; i < grad.size(); ++i)
        grad[i] = s * (g2[i] - target[i]);
      axpy(1.0, G.backward(grad, ctx_2), grad_g1);
      grad_g1_used = true;
    }
  }

  if (w3 > 0.0) {
    check(clean.same_shape(g1),
          "generator_losses: clean batch shape must match noisy batch");
    const Tensor reinjected = clean + g1;
    GeneratorCtx ctx_3;
    const Tensor g3 = G.forward(reinjected, Mode::TrainFrozenStats, ctx_3);
    b.l_rec = reconstruction_consistency_loss(g3, target);
    detail::check_finite(b.l_rec, "l_rec");
    if (backprop) {
      Tensor grad = g3;
      const real s = w3 * 2.0 / static_cast<real>(g3.size());
      for (std::size_t i = 0; i < grad.size(); ++i)
        grad[i] = s * (g3[i] - target[i]);
      axpy(1.0, G.backward(grad, ctx_3), grad_g1);
      grad_g1_used = true;
    }
  }

  if (backprop && grad_g1_used) G.backward(grad_g1, ctx1);

  b.total_g = total_generator_objective(b, w1, w2, w3);
  detail::check_finite(b.total_g, "total_g");
  return b;
}

// Convenience wrapper that also runs the primary pass. Used by gradient
// checks and evaluation; the training loop shares its primary pass with the
// discriminator update instead.
inline LossBreakdown generator_losses(Generator& G, Discriminator& D,
                                      const Tensor& noisy, const Tensor& clean,
                                      real w_gan, real w1, real w2, real w3,
                                      bool backprop,
                                      Mode primary_mode = Mode::Train,
                                      const Tensor* frozen_target = nullptr) {
  GeneratorCtx ctx1;
  const Tensor g1 = G.forward(noisy, primary_mode, ctx1);
  return generator_losses_given(G, D, noisy, clean, g1, ctx1, w_gan, w1, w2,
                                w3, backprop, frozen_target);
}

struct TrainOptions {
  LossMask mask = LossMask::full();
  int checkpoint_every = 10;  // epochs; 0 disables periodic checkpoints
  std::filesystem::path out_dir;  // empty: no files written
  bool mean_subtract = false;
};

struct TrainResult {
  std::vector<MetricsRow> metrics;
  std::filesystem::path last_checkpoint;
};

// Owns the two networks, their optimizers and the run's random stream.
// Construction order is fixed (generator draws first), so a seed pins every
// weight; the stream then drives batch shuffling and lives in checkpoints.
class Trainer {
 public:
  Trainer(const GeneratorConfig& gcfg, const DiscriminatorConfig& dcfg,
          const TrainSchedule& sched, std::uint64_t seed)
      : sched_(validated(sched)), rng_(seed), g_(gcfg, rng_), d_(dcfg, rng_),
        adam_g_({sched.lr_g, 0.5, 0.999, 1e-8}, g_.arrays("g")),
        adam_d_({sched.lr_d, 0.5, 0.999, 1e-8}, d_.arrays("d")) {}

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;
  Trainer(Trainer&&) = default;
  Trainer& operator=(Trainer&&) = default;

  Generator& generator() { return g_; }
  Discriminator& discriminator() { return d_; }
  const TrainSchedule& schedule() const { return sched_; }
  int epoch_next() const { return epoch_next_; }
  Rng& rng() { return rng_; }

  // One alternation: discriminator update on (clean, detached fake), then
  // generator update against the freshly updated discriminator.
  LossBreakdown train_step(const Tensor& noisy, const Tensor& clean, real w1,
                           real w2, real w3) {
    check(noisy.n() > 0 && clean.n() > 0, "train_step: empty batch");
    GeneratorCtx ctx1;
    const Tensor g1 = g_.forward(noisy, Mode::Train, ctx1);
    const Tensor fake = noisy - g1;

    adam_d_.zero_grads();
    const real l_d = discriminator_objective(d_, clean, fake, true);
    adam_d_.step();

    adam_g_.zero_grads();
    LossBreakdown b =
        generator_losses_given(g_, d_, noisy, clean, g1, ctx1, 1.0, w1, w2, w3,
                               true);
    adam_g_.step();
    b.l_gan_d = l_d;
    return b;
  }

  TrainResult train(const UnpairedCorpus& corpus, const TrainOptions& opts) {
    check(!corpus.noisy.empty() && !corpus.clean.empty(),
          "train: corpus must have noisy and clean patches");
    const Tensor noisy_all = stack_normalized(corpus.noisy, opts.mean_subtract);
    const Tensor clean_all = stack_normalized(corpus.clean, opts.mean_subtract);

    const int batch = sched_.batch_size;
    const std::size_t n_noisy = corpus.noisy.size();
    const std::size_t n_clean = corpus.clean.size();
    const int steps =
        static_cast<int>((n_noisy + batch - 1) / static_cast<std::size_t>(batch));

    TrainResult res;
    std::ofstream csv;
    if (!opts.out_dir.empty()) {
      std::filesystem::create_directories(opts.out_dir);
      const auto mode = epoch_next_ > 0 ? std::ios::app : std::ios::trunc;
      csv.open(opts.out_dir / "metrics.csv", mode);
      if (!csv)
        throw IoError("cannot open metrics log under " +
                      opts.out_dir.string());
      if (epoch_next_ == 0) csv << metrics_csv_header() << '\n';
    }

    std::vector<std::size_t> noisy_idx(n_noisy), clean_idx(n_clean);
    for (int epoch = epoch_next_; epoch < sched_.total_epochs; ++epoch) {
      const PhaseState ps = phase_state(epoch, sched_);
      const auto w = apply_mask({ps.w1, ps.w2, ps.w3}, opts.mask);
      std::iota(noisy_idx.begin(), noisy_idx.end(), std::size_t{0});
      std::iota(clean_idx.begin(), clean_idx.end(), std::size_t{0});
      rng_.shuffle(noisy_idx);
      rng_.shuffle(clean_idx);

      for (int s = 0; s < steps; ++s) {
        const std::size_t begin = static_cast<std::size_t>(s) * batch;
        const std::size_t bs = std::min<std::size_t>(batch, n_noisy - begin);
        const Tensor nb = gather(noisy_all, noisy_idx, begin, bs);
        Tensor cb(static_cast<int>(bs), clean_all.c(), clean_all.h(),
                  clean_all.w());
        for (std::size_t j = 0; j < bs; ++j)
          copy_sample(clean_all, clean_idx[(begin + j) % n_clean], cb, j);

        LossBreakdown b;
        try {
          b = train_step(nb, cb, w[0], w[1], w[2]);
        } catch (const Error& e) {
          throw Error(std::string(e.what()) + " (epoch " +
                      std::to_string(epoch) + ", step " + std::to_string(s) +
                      ")");
        }
        MetricsRow row{epoch, s, b, w[0], w[1], w[2]};
        res.metrics.push_back(row);
        if (csv.is_open()) csv << to_csv(row) << '\n';
      }

      epoch_next_ = epoch + 1;
      if (!opts.out_dir.empty() && due_checkpoint(epoch_next_, opts)) {
        char name[32];
        std::snprintf(name, sizeof(name), "epoch_%04d", epoch_next_);
        const auto dir = opts.out_dir / "checkpoints" / name;
        save(dir);
        res.last_checkpoint = dir;
      }
    }
    if (csv.is_open()) {
      csv.flush();
      if (!csv) throw IoError("metrics log write failed");
    }
    return res;
  }

  // Checkpoint: configs + epoch + RNG stream + both networks' arrays and
  // optimizer moments.
  void save(const std::filesystem::path& dir) {
    json meta;
    meta["version"] = version_string();
    meta["epoch_next"] = epoch_next_;
    meta["generator"] = generator_config_to_json(g_.config());
    meta["discriminator"] = discriminator_config_to_json(d_.config());
    meta["schedule"] = schedule_to_json(sched_);
    meta["rng"] = rng_.serialize();
    meta["adam_g_steps"] = adam_g_.steps_taken();
    meta["adam_d_steps"] = adam_d_.steps_taken();
    save_checkpoint(dir, meta, all_arrays());
  }

  static Trainer resume(const std::filesystem::path& dir) {
    const json meta = read_checkpoint_meta(dir);
    Trainer t(generator_config_from_json(meta.at("generator")),
              discriminator_config_from_json(meta.at("discriminator")),
              schedule_from_json(meta.at("schedule")), 0);
    load_checkpoint_arrays(dir, meta, t.all_arrays());
    t.rng_.deserialize(meta.at("rng").get<std::string>());
    t.adam_g_.set_steps_taken(meta.at("adam_g_steps").get<std::uint64_t>());
    t.adam_d_.set_steps_taken(meta.at("adam_d_steps").get<std::uint64_t>());
    t.epoch_next_ = meta.at("epoch_next").get<int>();
    return t;
  }

  // Scales patches to [0, 1]; optional per-channel mean removal on top.
  static Tensor stack_normalized(const std::vector<ImagePatch>& patches,
                                 bool mean_subtract) {
    std::vector<ImagePatch> normed;
    normed.reserve(patches.size());
    for (const auto& p : patches) {
      ImagePatch q = normalize(p, NormalizeMode::Scale);
      if (mean_subtract) q = normalize(q, NormalizeMode::MeanSubtract);
      normed.push_back(std::move(q));
    }
    return to_tensor(normed);
  }

 private:
  static TrainSchedule validated(const TrainSchedule& s) {
    s.validate();
    return s;
  }

  static void copy_sample(const Tensor& from, std::size_t src, Tensor& to,
                          std::size_t dst) {
    const std::size_t stride =
        static_cast<std::size_t>(from.c()) * from.h() * from.w();
    for (std::size_t i = 0; i < stride; ++i)
      to[dst * stride + i] = from[src * stride + i];
  }

  static Tensor gather(const Tensor& all, const std::vector<std::size_t>& idx,
                       std::size_t begin, std::size_t count) {
    Tensor out(static_cast<int>(count), all.c(), all.h(), all.w());
    for (std::size_t j = 0; j < count; ++j)
      copy_sample(all, idx[begin + j], out, j);
    return out;
  }

  bool due_checkpoint(int epoch_next, const TrainOptions& opts) const {
    if (epoch_next == sched_.ep1 || epoch_next == sched_.ep2) return true;
    if (epoch_next == sched_.total_epochs) return true;
    return opts.checkpoint_every > 0 && epoch_next % opts.checkpoint_every == 0;
  }

  std::vector<ArrayRef> all_arrays() {
    std::vector<ArrayRef> arrays = g_.arrays("g");
    for (auto& a : d_.arrays("d")) arrays.push_back(a);
    arrays.push_back({"adam_g.m", adam_g_.moment1().data(),
                      adam_g_.moment1().size(), nullptr});
    arrays.push_back({"adam_g.v", adam_g_.moment2().data(),
                      adam_g_.moment2().size(), nullptr});
    arrays.push_back({"adam_d.m", adam_d_.moment1().data(),
                      adam_d_.moment1().size(), nullptr});
    arrays.push_back({"adam_d.v", adam_d_.moment2().data(),
                      adam_d_.moment2().size(), nullptr});
    return arrays;
  }

  TrainSchedule sched_;
  Rng rng_;
  Generator g_;
  Discriminator d_;
  Adam adam_g_, adam_d_;
  int epoch_next_ = 0;
};

// Inference-only load: just the generator weights, no optimizer state.
inline Generator load_generator_checkpoint(const std::filesystem::path& dir) {
  const json meta = read_checkpoint_meta(dir);
  Rng scratch(0);
  Generator g(generator_config_from_json(meta.at("generator")), scratch);
  load_checkpoint_arrays(dir, meta, g.arrays("g"));
  return g;
}

}  // namespace scgan

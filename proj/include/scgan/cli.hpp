#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "scgan/checkpoint.hpp"
#include "scgan/config.hpp"
#include "scgan/corpus.hpp"
#include "scgan/evaluation.hpp"
#include "scgan/pipeline.hpp"
#include "scgan/presets.hpp"
#include "scgan/report.hpp"
#include "scgan/synthesis.hpp"
#include "scgan/trainer.hpp"

namespace scgan {

// Exit codes are part of the interface: 0 success, 1 runtime failure,
// 2 usage error, 3 invalid config, 4 missing checkpoint.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitCheckpoint = 4,
};

namespace cli {

struct Args {
  std::string config_path;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string checkpoint;
};

// defaults <- preset <- config file <- flag overrides, then one validation
// pass over the merged document.
inline RunConfig assemble_config(const Args& a) {
  if (a.preset.empty() && a.config_path.empty())
    throw ConfigError("missing configuration",
                      {"provide --config FILE and/or --preset {desk,paper}"});
  json doc = json::object();
  if (!a.preset.empty()) doc = preset_document(a.preset);
  if (!a.config_path.empty()) {
    const auto path = resolve_path(a.config_path);
    if (!std::filesystem::exists(path))
      throw ConfigError("cannot read config",
                        {"config file not found: " + path.string()});
    try {
      doc.merge_patch(detail::read_json(path));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config file is not valid JSON: " + path.string(),
                        {e.what()});
    }
  }
  if (a.seed) doc["seed"] = *a.seed;
  if (!a.out.empty()) doc["out"] = a.out;
  return validate_config(doc);
}

// Seed streams for the pipeline stages, all derived from the one config
// seed with fixed tags so no two stages share a stream.
struct SeedPlan {
  std::uint64_t corpus;
  std::uint64_t pairs;
  std::uint64_t holdout;
  std::uint64_t denoiser;
};

inline SeedPlan seed_plan(std::uint64_t seed) {
  const Rng root(seed);
  return {root.child_seed(1), root.child_seed(2), root.child_seed(3),
          root.child_seed(4)};
}

inline std::filesystem::path out_root(const RunConfig& cfg) {
  return resolve_path(cfg.out);
}

inline std::filesystem::path resolve_checkpoint(const RunConfig& cfg,
                                                const std::string& flag) {
  if (!flag.empty()) return resolve_path(flag);
  return latest_checkpoint(out_root(cfg) / "train" / "checkpoints");
}

inline void run_synth(const RunConfig& cfg) {
  Rng root(cfg.seed);
  std::vector<ImagePatch> sources;
  sources.reserve(cfg.synth.sources);
  for (int s = 0; s < cfg.synth.sources; ++s) {
    Rng srng = root.child(100 + static_cast<std::uint64_t>(s));
    sources.push_back(make_smooth_image(cfg.synth.source_size,
                                        cfg.synth.source_size, cfg.channels,
                                        srng, cfg.synth.source_lo,
                                        cfg.synth.source_hi));
  }
  const SeedPlan seeds = seed_plan(cfg.seed);
  const UnpairedCorpus corpus = build_unpaired_corpus(
      sources, cfg.synth.noise_spec(seeds.corpus), cfg.synth.split_ratio,
      seeds.corpus, cfg.synth.patch_size, cfg.synth.patches_per_source);
  const auto dir = resolve_path(cfg.corpus_dir);
  save_unpaired(corpus, dir);
  write_run_manifest(dir, cfg, "synth");
  std::cout << "corpus: " << corpus.noisy.size() << " noisy + "
            << corpus.clean.size() << " clean patches at " << dir.string()
            << "\n";
}

inline void run_train(const RunConfig& cfg, const std::string& checkpoint) {
  const UnpairedCorpus corpus = load_unpaired(resolve_path(cfg.corpus_dir));
  TrainOptions opts;
  opts.mask = cfg.train.loss_mask();
  opts.checkpoint_every = cfg.train.checkpoint_every;
  opts.mean_subtract = cfg.train.mean_subtract;
  opts.out_dir = out_root(cfg) / "train";

  TrainResult result;
  if (!checkpoint.empty()) {
    Trainer t = Trainer::resume(resolve_path(checkpoint));
    result = t.train(corpus, opts);
  } else {
    Trainer t(cfg.generator, cfg.discriminator, cfg.schedule, cfg.seed);
    result = t.train(corpus, opts);
  }
  write_run_manifest(opts.out_dir, cfg, "train");
  std::cout << "trained " << result.metrics.size() << " steps; checkpoint "
            << result.last_checkpoint.string() << "\n";
}

inline void run_extract(const RunConfig& cfg, const std::string& checkpoint) {
  Generator g = load_generator_checkpoint(resolve_checkpoint(cfg, checkpoint));
  const UnpairedCorpus corpus = load_unpaired(resolve_path(cfg.corpus_dir));
  const auto dir = out_root(cfg) / "extract";
  std::filesystem::create_directories(dir);

  for (std::size_t i = 0; i < corpus.noisy.size(); ++i) {
    auto [noise, estimate] =
        extract_noise(g, corpus.noisy[i], cfg.train.mean_subtract);
    const std::string stem = detail::index_name(i);
    save_patch(corpus.noisy[i], dir / (stem + "_noisy.png"));
    for (std::size_t k = 0; k < estimate.size(); ++k)
      estimate[k] = clamp(estimate[k], 0.0, 255.0);
    save_patch(estimate, dir / (stem + "_estimate.png"));
    save_noise_raw(noise, dir / (stem + "_noise"));
  }
  json manifest;
  manifest["count"] = corpus.noisy.size();
  detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  write_run_manifest(dir, cfg, "extract");
  std::cout << "extracted " << corpus.noisy.size() << " noise maps to "
            << dir.string() << "\n";
}

inline void run_pairs(const RunConfig& cfg, const std::string& checkpoint) {
  Generator g = load_generator_checkpoint(resolve_checkpoint(cfg, checkpoint));
  const UnpairedCorpus corpus = load_unpaired(resolve_path(cfg.corpus_dir));
  const SeedPlan seeds = seed_plan(cfg.seed);
  const PairedCorpus pairs =
      construct_pairs(g, corpus.noisy, corpus.clean, seeds.pairs,
                      cfg.pairs.count, cfg.train.mean_subtract);
  const auto dir = out_root(cfg) / "paired";
  save_paired(pairs, dir);
  write_run_manifest(dir, cfg, "pairs");
  std::cout << "constructed " << pairs.pairs.size() << " pairs at "
            << dir.string() << "\n";
}

inline void run_denoise_train(const RunConfig& cfg) {
  const PairedCorpus pairs = load_paired(out_root(cfg) / "paired");
  const auto dir = out_root(cfg) / "denoiser";
  std::filesystem::create_directories(dir);
  const SeedPlan seeds = seed_plan(cfg.seed);
  Denoiser dn = train_denoiser(pairs, cfg.denoiser, cfg.channels,
                               seeds.denoiser, dir / "metrics.csv");
  dn.save(dir);
  write_run_manifest(dir, cfg, "denoise-train");
  std::cout << "denoiser trained on " << pairs.pairs.size() << " pairs; saved "
            << dir.string() << "\n";
}

inline void run_denoise(const RunConfig& cfg, const std::string& checkpoint) {
  const auto dn_dir = checkpoint.empty() ? out_root(cfg) / "denoiser"
                                         : resolve_path(checkpoint);
  Denoiser dn = Denoiser::load(dn_dir);
  const UnpairedCorpus corpus = load_unpaired(resolve_path(cfg.corpus_dir));
  const auto dir = out_root(cfg) / "denoised";
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < corpus.noisy.size(); ++i)
    save_patch(dn.denoise(corpus.noisy[i]),
               dir / (detail::index_name(i) + ".png"));
  json manifest;
  manifest["count"] = corpus.noisy.size();
  detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  write_run_manifest(dir, cfg, "denoise");
  std::cout << "denoised " << corpus.noisy.size() << " images to "
            << dir.string() << "\n";
}

inline void run_eval(const RunConfig& cfg, const std::string& checkpoint) {
  Generator g = load_generator_checkpoint(resolve_checkpoint(cfg, checkpoint));
  const SeedPlan seeds = seed_plan(cfg.seed);
  const Holdout holdout =
      make_holdout(cfg.synth, cfg.channels, cfg.eval.holdout_sources,
                   cfg.eval.holdout_patches, seeds.holdout);
  const GeneratorEvaluation ev =
      evaluate_generator(g, holdout, cfg.train.mean_subtract);

  json doc = evaluation_to_json(ev);
  const auto dn_dir = out_root(cfg) / "denoiser";
  if (std::filesystem::exists(dn_dir / "checkpoint.json")) {
    Denoiser dn = Denoiser::load(dn_dir);
    doc["denoiser_psnr_gain_db"] = denoiser_psnr_gain(dn, holdout);
  }

  const auto dir = out_root(cfg) / "eval";
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "evaluation.json", doc.dump(2) + "\n");
  write_run_manifest(dir, cfg, "eval");
  std::cout << "evaluation: extracted_std " << ev.extracted_std
            << ", psnr_gain_db " << ev.psnr_gain_db << "; full results at "
            << (dir / "evaluation.json").string() << "\n";
}

inline void run_ablate(const RunConfig& cfg) {
  const UnpairedCorpus corpus = load_unpaired(resolve_path(cfg.corpus_dir));
  const SeedPlan seeds = seed_plan(cfg.seed);
  const Holdout holdout =
      make_holdout(cfg.synth, cfg.channels, cfg.eval.holdout_sources,
                   cfg.eval.holdout_patches, seeds.holdout);
  const auto dir = out_root(cfg) / "ablation";
  const AblationResult result = run_ablation(
      corpus, cfg.generator, cfg.discriminator, cfg.schedule, holdout,
      cfg.seed, dir, cfg.train.checkpoint_every, cfg.train.mean_subtract);
  write_run_manifest(dir, cfg, "ablate");
  for (const auto& v : result.variants)
    std::cout << v.name << ": clean_response " << v.eval.clean_response_mean_abs
              << ", edge_correlation " << v.eval.edge_correlation << "\n";
  std::cout << "summary at " << (dir / "summary.json").string() << "\n";
}

inline void run_report(const RunConfig& cfg) {
  ReportInputs in;
  const auto root = out_root(cfg);
  if (std::filesystem::exists(root / "train" / "metrics.csv"))
    in.metrics = parse_metrics_csv(root / "train" / "metrics.csv");

  const auto extract_dir = root / "extract";
  if (std::filesystem::exists(extract_dir / "manifest.json")) {
    const json manifest = detail::read_json(extract_dir / "manifest.json");
    const std::size_t available = manifest.at("count").get<std::size_t>();
    ReportSampleSet set;
    set.title = "extracted noise";
    for (std::size_t i = 0; i < std::min<std::size_t>(available, 4); ++i) {
      const std::string stem = detail::index_name(i);
      set.noisy.push_back(load_patch(extract_dir / (stem + "_noisy.png")));
      set.extracted.push_back(load_noise_raw(extract_dir / (stem + "_noise")));
      set.estimates.push_back(
          load_patch(extract_dir / (stem + "_estimate.png")));
    }
    if (!set.noisy.empty()) in.samples.push_back(std::move(set));
  }

  if (std::filesystem::exists(root / "ablation" / "summary.json"))
    in.summary = detail::read_json(root / "ablation" / "summary.json");

  const auto dir = root / "report";
  write_report(dir, in);
  write_run_manifest(dir, cfg, "report");
  std::cout << "report at " << (dir / "report.html").string() << "\n";
}

}  // namespace cli

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"self-consistent noise extraction and blind denoising"};
  app.require_subcommand(1);

  cli::Args args;
  auto add_common = [&](CLI::App* sub, bool with_checkpoint) {
    sub->add_option("--config", args.config_path, "JSON config file");
    sub->add_option("--preset", args.preset, "built-in preset: desk or paper");
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--out", args.out, "override the output root");
    if (with_checkpoint)
      sub->add_option("--checkpoint", args.checkpoint,
                      "checkpoint directory (default: newest under "
                      "<out>/train/checkpoints)");
    return sub;
  };

  add_common(app.add_subcommand("synth", "synthesize an unpaired corpus"),
             false);
  add_common(app.add_subcommand("train", "train the noise extractor"), true);
  add_common(app.add_subcommand(
                 "extract", "extract noise maps and clean estimates"),
             true);
  add_common(app.add_subcommand("pairs", "construct a paired corpus"), true);
  add_common(app.add_subcommand("denoise-train",
                                "train the denoiser on constructed pairs"),
             false);
  add_common(app.add_subcommand("denoise", "denoise the corpus noisy set"),
             true);
  add_common(app.add_subcommand("eval", "evaluate on a held-out synth set"),
             true);
  add_common(app.add_subcommand("ablate", "train and compare loss variants"),
             false);
  add_common(app.add_subcommand("report", "render an HTML report"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = cli::assemble_config(args);
    if (command == "synth") {
      cli::run_synth(cfg);
    } else if (command == "train") {
      cli::run_train(cfg, args.checkpoint);
    } else if (command == "extract") {
      cli::run_extract(cfg, args.checkpoint);
    } else if (command == "pairs") {
      cli::run_pairs(cfg, args.checkpoint);
    } else if (command == "denoise-train") {
      cli::run_denoise_train(cfg);
    } else if (command == "denoise") {
      cli::run_denoise(cfg, args.checkpoint);
    } else if (command == "eval") {
      cli::run_eval(cfg, args.checkpoint);
    } else if (command == "ablate") {
      cli::run_ablate(cfg);
    } else {
      cli::run_report(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace scgan

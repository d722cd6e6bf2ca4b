#pragma once

#include <array>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "scgan/corpus.hpp"
#include "scgan/discriminator.hpp"
#include "scgan/generator.hpp"
#include "scgan/schedule.hpp"
#include "scgan/synthesis.hpp"

namespace scgan {

inline std::string version_string() {
#ifdef SCGAN_VERSION
  return SCGAN_VERSION;
#else
  return "unversioned";
#endif
}

// Relative paths are optionally anchored at $SCGAN_DATA_DIR.
inline std::filesystem::path resolve_path(const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute()) return path;
  if (const char* prefix = std::getenv("SCGAN_DATA_DIR"))
    return std::filesystem::path(prefix) / path;
  return path;
}

// Residual denoiser trained on constructed pairs: predicts the noise map,
// clean estimate = input - prediction.
struct DenoiserConfig {
  int depth = 5;
  int mid_channels = 32;
  int epochs = 30;
  real lr = 1e-3;
  int batch_size = 8;
  int patch_size = 0;  // 0: train on the pairs at their stored size

  void validate() const {
    std::vector<std::string> violations;
    if (depth < 3) violations.push_back("denoiser depth must be >= 3");
    if (mid_channels < 1)
      violations.push_back("denoiser mid_channels must be >= 1");
    if (epochs < 1) violations.push_back("denoiser epochs must be >= 1");
    if (lr <= 0.0) violations.push_back("denoiser lr must be > 0");
    if (batch_size < 1)
      violations.push_back("denoiser batch_size must be >= 1");
    if (patch_size < 0)
      violations.push_back("denoiser patch_size must be >= 0");
    if (!violations.empty())
      throw ConfigError("invalid denoiser config", violations);
  }
};

struct SynthConfig {
  std::string kind = "gaussian";
  real sigma = 25.0;
  RainStreakSpec rain{};
  int sources = 10;
  int source_size = 96;
  real source_lo = 60.0;
  real source_hi = 200.0;
  int patch_size = 32;
  int patches_per_source = 20;
  real split_ratio = 0.5;

  void validate() const {
    std::vector<std::string> violations;
    if (kind != "gaussian" && kind != "rain")
      violations.push_back("synth kind must be \"gaussian\" or \"rain\"");
    if (kind == "gaussian" && !(sigma > 0.0))
      violations.push_back("sigma must be > 0");
    if (kind == "rain") {
      try {
        rain.validate();
      } catch (const ConfigError& e) {
        violations.insert(violations.end(), e.violations.begin(),
                          e.violations.end());
      }
    }
    if (sources < 2) violations.push_back("synth sources must be >= 2");
    if (source_size < 1) violations.push_back("source_size must be >= 1");
    if (!(source_lo >= 0.0 && source_hi <= 255.0 && source_lo < source_hi))
      violations.push_back("source_range must satisfy 0 <= lo < hi <= 255");
    if (patch_size < 0 || (patch_size > 0 && patch_size > source_size))
      violations.push_back("patch_size must be in [0, source_size]");
    if (patches_per_source < 1)
      violations.push_back("patches_per_source must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
      violations.push_back("split_ratio must be strictly between 0 and 1");
    if (!violations.empty()) throw ConfigError("invalid synth config", violations);
  }

  NoiseSpec noise_spec(std::uint64_t seed) const {
    if (kind == "rain") {
      RainStreakSpec r = rain;
      r.seed = seed;
      return r;
    }
    GaussianNoiseSpec g;
    g.sigma = sigma;
    g.seed = seed;
    return g;
  }
};

struct TrainControl {
  int checkpoint_every = 10;
  std::string mask = "full";
  bool mean_subtract = false;

  void validate() const {
    std::vector<std::string> violations;
    if (checkpoint_every < 0)
      violations.push_back("checkpoint_every must be >= 0");
    if (mask != "full" && mask != "gan_only" && mask != "no_reconstruction")
      violations.push_back(
          "mask must be one of \"full\", \"gan_only\", \"no_reconstruction\"");
    if (!violations.empty())
      throw ConfigError("invalid train control", violations);
  }

  LossMask loss_mask() const {
    if (mask == "gan_only") return LossMask::gan_only();
    if (mask == "no_reconstruction") return LossMask::no_reconstruction();
    return LossMask::full();
  }
};

struct PairsConfig {
  int count = 100;

  void validate() const {
    if (count < 1)
      throw ConfigError("invalid pairs config", {"pairs count must be >= 1"});
  }
};

struct EvalConfig {
  int holdout_sources = 4;
  int holdout_patches = 40;

  void validate() const {
    std::vector<std::string> violations;
    if (holdout_sources < 1)
      violations.push_back("holdout_sources must be >= 1");
    if (holdout_patches < 1)
      violations.push_back("holdout_patches must be >= 1");
    if (!violations.empty())
      throw ConfigError("invalid eval config", violations);
  }
};

// The one document that drives a whole run. Defaults are the desk preset's
// building blocks; a preset or config file overlays them.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out = "out";
  int channels = 1;
  std::string corpus_dir = "corpus";
  SynthConfig synth;
  GeneratorConfig generator{7, 32, 3, 1, 7};
  DiscriminatorConfig discriminator;
  TrainSchedule schedule;
  TrainControl train;
  PairsConfig pairs;
  DenoiserConfig denoiser;
  EvalConfig eval;
};

namespace detail {

// Collects type errors and unknown keys instead of failing fast, so a config
// author sees every problem at once.
class JsonReader {
 public:
  JsonReader(const json& j, std::string prefix,
             std::vector<std::string>& violations)
      : j_(j), prefix_(std::move(prefix)), violations_(violations) {}

  template <class T>
  void get(const char* key, T& dst) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      dst = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      violations_.push_back(prefix_ + key + ": wrong type");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* section(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    if (!j_.at(key).is_object()) {
      violations_.push_back(prefix_ + key + ": must be an object");
      return nullptr;
    }
    return &j_.at(key);
  }

  void mark_seen(const char* key) { seen_.insert(key); }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key()))
        violations_.push_back("unknown key: " + prefix_ + it.key());
    }
  }

 private:
  const json& j_;
  std::string prefix_;
  std::vector<std::string>& violations_;
  std::set<std::string> seen_;
};

inline void merge_violations(std::vector<std::string>& into,
                             const std::string& prefix,
                             const ConfigError& e) {
  for (const auto& v : e.violations) into.push_back(prefix + v);
}

}  // namespace detail

// Parses and fully validates a config document. Returns the defaulted config
// or throws with the complete list of violations.
inline RunConfig validate_config(const json& doc) {
  RunConfig cfg;
  std::vector<std::string> violations;
  if (!doc.is_object()) {
    throw ConfigError("invalid config document",
                      {"top-level document must be a JSON object"});
  }

  detail::JsonReader top(doc, "", violations);
  if (!top.has("seed")) {
    violations.push_back(
        "seed is required (no implicit randomness; set it in the config or "
        "via --seed)");
  }
  top.get("seed", cfg.seed);
  top.get("out", cfg.out);
  top.get("channels", cfg.channels);
  top.get("corpus_dir", cfg.corpus_dir);

  if (const json* s = top.section("synth")) {
    detail::JsonReader r(*s, "synth.", violations);
    r.get("kind", cfg.synth.kind);
    r.get("sigma", cfg.synth.sigma);
    r.get("sources", cfg.synth.sources);
    r.get("source_size", cfg.synth.source_size);
    std::array<real, 2> range{cfg.synth.source_lo, cfg.synth.source_hi};
    r.get("source_range", range);
    cfg.synth.source_lo = range[0];
    cfg.synth.source_hi = range[1];
    r.get("patch_size", cfg.synth.patch_size);
    r.get("patches_per_source", cfg.synth.patches_per_source);
    r.get("split_ratio", cfg.synth.split_ratio);
    if (const json* rain = r.section("rain")) {
      detail::JsonReader rr(*rain, "synth.rain.", violations);
      rr.get("count", cfg.synth.rain.count);
      std::array<real, 2> len{cfg.synth.rain.length_lo, cfg.synth.rain.length_hi};
      rr.get("length", len);
      cfg.synth.rain.length_lo = len[0];
      cfg.synth.rain.length_hi = len[1];
      std::array<real, 2> ang{cfg.synth.rain.angle_lo, cfg.synth.rain.angle_hi};
      rr.get("angle", ang);
      cfg.synth.rain.angle_lo = ang[0];
      cfg.synth.rain.angle_hi = ang[1];
      std::array<real, 2> inten{cfg.synth.rain.intensity_lo,
                                cfg.synth.rain.intensity_hi};
      rr.get("intensity", inten);
      cfg.synth.rain.intensity_lo = inten[0];
      cfg.synth.rain.intensity_hi = inten[1];
      rr.get("thickness", cfg.synth.rain.thickness);
      rr.finish();
    }
    r.finish();
  }

  if (const json* g = top.section("generator")) {
    detail::JsonReader r(*g, "generator.", violations);
    r.get("depth", cfg.generator.depth);
    r.get("mid_channels", cfg.generator.mid_channels);
    r.get("kernel", cfg.generator.kernel);
    cfg.generator.padding =
        cfg.generator.depth * (cfg.generator.kernel - 1) / 2;
    r.get("padding", cfg.generator.padding);
    r.finish();
  } else {
    cfg.generator.padding = cfg.generator.depth * (cfg.generator.kernel - 1) / 2;
  }

  if (const json* d = top.section("discriminator")) {
    detail::JsonReader r(*d, "discriminator.", violations);
    r.get("channels", cfg.discriminator.channels);
    r.get("kernels", cfg.discriminator.kernels);
    r.get("strides", cfg.discriminator.strides);
    r.get("leaky_slope", cfg.discriminator.leaky_slope);
    r.finish();
  }

  if (const json* s = top.section("schedule")) {
    detail::JsonReader r(*s, "schedule.", violations);
    r.get("ep1", cfg.schedule.ep1);
    r.get("ep2", cfg.schedule.ep2);
    r.get("ep3", cfg.schedule.ep3);
    cfg.schedule.total_epochs = cfg.schedule.ep3;
    r.get("total_epochs", cfg.schedule.total_epochs);
    r.get("w1", cfg.schedule.w1_target);
    r.get("w2", cfg.schedule.w2_target);
    r.get("w3", cfg.schedule.w3_target);
    r.get("batch_size", cfg.schedule.batch_size);
    r.get("lr_g", cfg.schedule.lr_g);
    r.get("lr_d", cfg.schedule.lr_d);
    std::string ramp = cfg.schedule.ramp == WeightRamp::Linear ? "linear" : "step";
    r.get("ramp", ramp);
    if (ramp == "linear") {
      cfg.schedule.ramp = WeightRamp::Linear;
    } else if (ramp == "step") {
      cfg.schedule.ramp = WeightRamp::Step;
    } else {
      violations.push_back("schedule.ramp must be \"step\" or \"linear\"");
    }
    r.finish();
  }

  if (const json* t = top.section("train")) {
    detail::JsonReader r(*t, "train.", violations);
    r.get("checkpoint_every", cfg.train.checkpoint_every);
    r.get("mask", cfg.train.mask);
    r.get("mean_subtract", cfg.train.mean_subtract);
    r.finish();
  }

  if (const json* p = top.section("pairs")) {
    detail::JsonReader r(*p, "pairs.", violations);
    r.get("count", cfg.pairs.count);
    r.finish();
  }

  if (const json* d = top.section("denoiser")) {
    detail::JsonReader r(*d, "denoiser.", violations);
    r.get("depth", cfg.denoiser.depth);
    r.get("mid_channels", cfg.denoiser.mid_channels);
    r.get("epochs", cfg.denoiser.epochs);
    r.get("lr", cfg.denoiser.lr);
    r.get("batch_size", cfg.denoiser.batch_size);
    r.get("patch_size", cfg.denoiser.patch_size);
    r.finish();
  }

  if (const json* e = top.section("eval")) {
    detail::JsonReader r(*e, "eval.", violations);
    r.get("holdout_sources", cfg.eval.holdout_sources);
    r.get("holdout_patches", cfg.eval.holdout_patches);
    r.finish();
  }
  top.finish();

  if (cfg.channels != 1 && cfg.channels != 3)
    violations.push_back("channels must be 1 or 3");
  cfg.generator.in_channels = cfg.channels;
  cfg.discriminator.in_channels = cfg.channels;
  if (cfg.out.empty()) violations.push_back("out must be a non-empty path");
  if (cfg.corpus_dir.empty())
    violations.push_back("corpus_dir must be a non-empty path");

  auto run = [&](const char* prefix, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      detail::merge_violations(violations, prefix, e);
    }
  };
  run("synth: ", [&] { cfg.synth.validate(); });
  run("generator: ", [&] { cfg.generator.validate(); });
  run("discriminator: ", [&] { cfg.discriminator.validate(); });
  run("schedule: ", [&] { cfg.schedule.validate(); });
  run("train: ", [&] { cfg.train.validate(); });
  run("pairs: ", [&] { cfg.pairs.validate(); });
  run("denoiser: ", [&] { cfg.denoiser.validate(); });
  run("eval: ", [&] { cfg.eval.validate(); });

  if (!violations.empty()) throw ConfigError("invalid config", violations);
  return cfg;
}

// Emits a document that validates back to the identical config, which is
// what run.json stores.
inline json to_json(const RunConfig& cfg) {
  json doc;
  doc["seed"] = cfg.seed;
  doc["out"] = cfg.out;
  doc["channels"] = cfg.channels;
  doc["corpus_dir"] = cfg.corpus_dir;
  doc["synth"] = {
      {"kind", cfg.synth.kind},
      {"sigma", cfg.synth.sigma},
      {"sources", cfg.synth.sources},
      {"source_size", cfg.synth.source_size},
      {"source_range", {cfg.synth.source_lo, cfg.synth.source_hi}},
      {"patch_size", cfg.synth.patch_size},
      {"patches_per_source", cfg.synth.patches_per_source},
      {"split_ratio", cfg.synth.split_ratio},
      {"rain",
       {{"count", cfg.synth.rain.count},
        {"length", {cfg.synth.rain.length_lo, cfg.synth.rain.length_hi}},
        {"angle", {cfg.synth.rain.angle_lo, cfg.synth.rain.angle_hi}},
        {"intensity",
         {cfg.synth.rain.intensity_lo, cfg.synth.rain.intensity_hi}},
        {"thickness", cfg.synth.rain.thickness}}}};
  doc["generator"] = {{"depth", cfg.generator.depth},
                      {"mid_channels", cfg.generator.mid_channels},
                      {"kernel", cfg.generator.kernel},
                      {"padding", cfg.generator.padding}};
  doc["discriminator"] = {{"channels", cfg.discriminator.channels},
                          {"kernels", cfg.discriminator.kernels},
                          {"strides", cfg.discriminator.strides},
                          {"leaky_slope", cfg.discriminator.leaky_slope}};
  doc["schedule"] = {
      {"ep1", cfg.schedule.ep1},
      {"ep2", cfg.schedule.ep2},
      {"ep3", cfg.schedule.ep3},
      {"total_epochs", cfg.schedule.total_epochs},
      {"w1", cfg.schedule.w1_target},
      {"w2", cfg.schedule.w2_target},
      {"w3", cfg.schedule.w3_target},
      {"batch_size", cfg.schedule.batch_size},
      {"lr_g", cfg.schedule.lr_g},
      {"lr_d", cfg.schedule.lr_d},
      {"ramp", cfg.schedule.ramp == WeightRamp::Linear ? "linear" : "step"}};
  doc["train"] = {{"checkpoint_every", cfg.train.checkpoint_every},
                  {"mask", cfg.train.mask},
                  {"mean_subtract", cfg.train.mean_subtract}};
  doc["pairs"] = {{"count", cfg.pairs.count}};
  doc["denoiser"] = {{"depth", cfg.denoiser.depth},
                     {"mid_channels", cfg.denoiser.mid_channels},
                     {"epochs", cfg.denoiser.epochs},
                     {"lr", cfg.denoiser.lr},
                     {"batch_size", cfg.denoiser.batch_size},
                     {"patch_size", cfg.denoiser.patch_size}};
  doc["eval"] = {{"holdout_sources", cfg.eval.holdout_sources},
                 {"holdout_patches", cfg.eval.holdout_patches}};
  return doc;
}

// Component round-trips used by checkpoint metadata; unlike validate_config
// these trust their input (it is our own artifact).
inline json generator_config_to_json(const GeneratorConfig& c) {
  return {{"depth", c.depth},
          {"mid_channels", c.mid_channels},
          {"kernel", c.kernel},
          {"in_channels", c.in_channels},
          {"padding", c.padding}};
}

inline GeneratorConfig generator_config_from_json(const json& j) {
  GeneratorConfig c;
  c.depth = j.at("depth").get<int>();
  c.mid_channels = j.at("mid_channels").get<int>();
  c.kernel = j.at("kernel").get<int>();
  c.in_channels = j.at("in_channels").get<int>();
  c.padding = j.at("padding").get<int>();
  return c;
}

inline json discriminator_config_to_json(const DiscriminatorConfig& c) {
  return {{"in_channels", c.in_channels},
          {"channels", c.channels},
          {"kernels", c.kernels},
          {"strides", c.strides},
          {"leaky_slope", c.leaky_slope}};
}

inline DiscriminatorConfig discriminator_config_from_json(const json& j) {
  DiscriminatorConfig c;
  c.in_channels = j.at("in_channels").get<int>();
  c.channels = j.at("channels").get<std::array<int, 4>>();
  c.kernels = j.at("kernels").get<std::array<int, 4>>();
  c.strides = j.at("strides").get<std::array<int, 4>>();
  c.leaky_slope = j.at("leaky_slope").get<real>();
  return c;
}

inline json schedule_to_json(const TrainSchedule& s) {
  return {{"ep1", s.ep1},
          {"ep2", s.ep2},
          {"ep3", s.ep3},
          {"total_epochs", s.total_epochs},
          {"w1", s.w1_target},
          {"w2", s.w2_target},
          {"w3", s.w3_target},
          {"batch_size", s.batch_size},
          {"lr_g", s.lr_g},
          {"lr_d", s.lr_d},
          {"ramp", s.ramp == WeightRamp::Linear ? "linear" : "step"}};
}

inline TrainSchedule schedule_from_json(const json& j) {
  TrainSchedule s;
  s.ep1 = j.at("ep1").get<int>();
  s.ep2 = j.at("ep2").get<int>();
  s.ep3 = j.at("ep3").get<int>();
  s.total_epochs = j.at("total_epochs").get<int>();
  s.w1_target = j.at("w1").get<real>();
  s.w2_target = j.at("w2").get<real>();
  s.w3_target = j.at("w3").get<real>();
  s.batch_size = j.at("batch_size").get<int>();
  s.lr_g = j.at("lr_g").get<real>();
  s.lr_d = j.at("lr_d").get<real>();
  s.ramp = j.at("ramp").get<std::string>() == "linear" ? WeightRamp::Linear
                                                       : WeightRamp::Step;
  return s;
}

inline json mask_to_json(const LossMask& m) {
  return {{"clean", m.clean}, {"pn", m.pn}, {"rec", m.rec}};
}

inline LossMask mask_from_json(const json& j) {
  return {j.at("clean").get<bool>(), j.at("pn").get<bool>(),
          j.at("rec").get<bool>()};
}

inline void write_run_manifest(const std::filesystem::path& dir,
                               const RunConfig& cfg,
                               const std::string& subcommand) {
  json run;
  run["version"] = version_string();
  run["subcommand"] = subcommand;
  run["config"] = to_json(cfg);
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "run.json", run.dump(2) + "\n");
}

}  // namespace scgan

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "scgan/config.hpp"
#include "scgan/presets.hpp"

namespace scgan {
namespace {

json minimal_config() { return json{{"seed", 1}}; }

std::string violations_text(const json& doc) {
  try {
    validate_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ValidateConfig, SeedIsMandatory) {
  const std::string msg = violations_text(json::object());
  EXPECT_NE(msg.find("seed is required"), std::string::npos);
  EXPECT_NO_THROW(validate_config(minimal_config()));
}

TEST(ValidateConfig, UnknownKeysAreReportedAtEveryLevel) {
  json doc = minimal_config();
  doc["typo_key"] = 1;
  doc["schedule"] = {{"ep1", 2}, {"mystery", true}};
  const std::string msg = violations_text(doc);
  EXPECT_NE(msg.find("unknown key: typo_key"), std::string::npos);
  EXPECT_NE(msg.find("unknown key: schedule.mystery"), std::string::npos);
}

TEST(ValidateConfig, WrongTypesAreReportedWithPaths) {
  json doc = minimal_config();
  doc["channels"] = "three";
  doc["synth"] = {{"sigma", "loud"}};
  const std::string msg = violations_text(doc);
  EXPECT_NE(msg.find("channels: wrong type"), std::string::npos);
  EXPECT_NE(msg.find("synth.sigma: wrong type"), std::string::npos);
}

TEST(ValidateConfig, CollectsEveryViolationInOneError) {
  json doc = minimal_config();
  doc["schedule"] = {{"ep1", 5}, {"ep2", 3}};
  doc["generator"] = {{"depth", 1}};
  doc["stray"] = 0;
  try {
    validate_config(doc);
    FAIL() << "expected a combined failure";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.violations.size(), 3u) << e.what();
  }
}

TEST(ValidateConfig, NonObjectDocumentRejected) {
  EXPECT_THROW(validate_config(json::array()), ConfigError);
  EXPECT_THROW(validate_config(json(3)), ConfigError);
}

TEST(ValidateConfig, SerializationRoundTripIsIdempotent) {
  json doc = preset_document("desk");
  const RunConfig cfg = validate_config(doc);
  const json once = to_json(cfg);
  const RunConfig cfg2 = validate_config(once);
  const json twice = to_json(cfg2);
  EXPECT_EQ(once, twice);
  EXPECT_EQ(cfg2.seed, cfg.seed);
  EXPECT_EQ(cfg2.schedule.total_epochs, cfg.schedule.total_epochs);
}

TEST(ValidateConfig, ChannelsPropagateToNetworkConfigs) {
  json doc = minimal_config();
  doc["channels"] = 3;
  const RunConfig cfg = validate_config(doc);
  EXPECT_EQ(cfg.generator.in_channels, 3);
  EXPECT_EQ(cfg.discriminator.in_channels, 3);
}

TEST(Presets, BothParseValidateAndDiffer) {
  for (const char* name : {"desk", "paper"}) {
    const RunConfig cfg = validate_config(preset_document(name));
    EXPECT_GT(cfg.schedule.total_epochs, 0) << name;
  }
  EXPECT_NE(preset_document("desk"), preset_document("paper"));
  EXPECT_THROW(preset_document("fridge"), ConfigError);
}

TEST(Presets, EmbeddedTextMatchesFilesOnDisk) {
  const std::filesystem::path root(SCGAN_SOURCE_DIR);
  for (const char* name : {"desk", "paper"}) {
    std::ifstream in(root / "presets" / (std::string(name) + ".json"));
    ASSERT_TRUE(in) << name;
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(json::parse(ss.str()), preset_document(name)) << name;
  }
}

TEST(ResolvePath, AnchorsRelativePathsAtDataDirOnly) {
  unsetenv("SCGAN_DATA_DIR");
  EXPECT_EQ(resolve_path("rel/x"), std::filesystem::path("rel/x"));
  EXPECT_EQ(resolve_path("/abs/x"), std::filesystem::path("/abs/x"));
  setenv("SCGAN_DATA_DIR", "/data", 1);
  EXPECT_EQ(resolve_path("rel/x"), std::filesystem::path("/data/rel/x"));
  EXPECT_EQ(resolve_path("/abs/x"), std::filesystem::path("/abs/x"));
  unsetenv("SCGAN_DATA_DIR");
}

TEST(ComponentRoundTrips, NetworkScheduleAndMaskSurviveJson) {
  GeneratorConfig g{5, 24, 3, 3, 5};
  const GeneratorConfig g2 =
      generator_config_from_json(generator_config_to_json(g));
  EXPECT_EQ(g2.depth, 5);
  EXPECT_EQ(g2.mid_channels, 24);
  EXPECT_EQ(g2.in_channels, 3);

  DiscriminatorConfig d;
  d.kernels = {3, 3, 3, 3};
  d.strides = {2, 1, 1, 1};
  const DiscriminatorConfig d2 =
      discriminator_config_from_json(discriminator_config_to_json(d));
  EXPECT_EQ(d2.kernels, d.kernels);
  EXPECT_EQ(d2.strides, d.strides);

  TrainSchedule s;
  s.ep1 = 3;
  s.ep2 = 6;
  s.ep3 = 9;
  s.total_epochs = 12;
  s.w3_target = 0.25;
  s.ramp = WeightRamp::Linear;
  const TrainSchedule s2 = schedule_from_json(schedule_to_json(s));
  EXPECT_EQ(s2.ep1, 3);
  EXPECT_EQ(s2.total_epochs, 12);
  EXPECT_DOUBLE_EQ(s2.w3_target, 0.25);
  EXPECT_EQ(s2.ramp, WeightRamp::Linear);

  const LossMask m = mask_from_json(mask_to_json(LossMask::no_reconstruction()));
  EXPECT_TRUE(m.clean);
  EXPECT_TRUE(m.pn);
  EXPECT_FALSE(m.rec);
}

}  // namespace
}  // namespace scgan

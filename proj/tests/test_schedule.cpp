#include <gtest/gtest.h>

#include <array>

#include "scgan/schedule.hpp"

namespace scgan {
namespace {

TrainSchedule sched(int ep1, int ep2, int ep3, real w1 = 1.0, real w2 = 1.0,
                    real w3 = 0.5) {
  TrainSchedule s;
  s.ep1 = ep1;
  s.ep2 = ep2;
  s.ep3 = ep3;
  s.total_epochs = ep3;
  s.w1_target = w1;
  s.w2_target = w2;
  s.w3_target = w3;
  return s;
}

void expect_weights(int epoch, const TrainSchedule& s,
                    const std::array<real, 3>& want) {
  const auto got = phase_weights(epoch, s);
  EXPECT_DOUBLE_EQ(got[0], want[0]) << "epoch " << epoch;
  EXPECT_DOUBLE_EQ(got[1], want[1]) << "epoch " << epoch;
  EXPECT_DOUBLE_EQ(got[2], want[2]) << "epoch " << epoch;
}

TEST(Schedule, StepWeightsByPhase) {
  const TrainSchedule s = sched(10, 20, 30);
  expect_weights(0, s, {0.0, 0.0, 0.0});
  expect_weights(9, s, {0.0, 0.0, 0.0});
  expect_weights(10, s, {1.0, 1.0, 0.0});
  expect_weights(15, s, {1.0, 1.0, 0.0});
  expect_weights(19, s, {1.0, 1.0, 0.0});
  expect_weights(20, s, {1.0, 1.0, 0.5});
  expect_weights(25, s, {1.0, 1.0, 0.5});
  expect_weights(30, s, {1.0, 1.0, 0.5});
}

TEST(Schedule, PhaseIndexBoundaries) {
  const TrainSchedule s = sched(10, 20, 30);
  EXPECT_EQ(phase_index(0, s), 1);
  EXPECT_EQ(phase_index(9, s), 1);
  EXPECT_EQ(phase_index(10, s), 2);
  EXPECT_EQ(phase_index(19, s), 2);
  EXPECT_EQ(phase_index(20, s), 3);
  EXPECT_EQ(phase_index(30, s), 3);
}

TEST(Schedule, DegeneratePhasesCollapseCleanly) {
  // ep1 == ep2 skips phase 2 entirely; ep2 == ep3 starts phase 3 at ep2.
  const TrainSchedule a = sched(5, 5, 10);
  expect_weights(4, a, {0.0, 0.0, 0.0});
  expect_weights(5, a, {1.0, 1.0, 0.5});
  const TrainSchedule b = sched(3, 8, 8);
  expect_weights(7, b, {1.0, 1.0, 0.0});
  expect_weights(8, b, {1.0, 1.0, 0.5});
}

TEST(Schedule, EpochRangeIsGuarded) {
  const TrainSchedule s = sched(2, 4, 6);
  EXPECT_THROW(phase_state(-1, s), Error);
  EXPECT_THROW(phase_state(7, s), Error);
  EXPECT_NO_THROW(phase_state(6, s));
}

TEST(Schedule, WeightsNeverDecreaseAcrossEpochs) {
  const TrainSchedule variants[] = {sched(1, 1, 1), sched(3, 7, 11, 0.5, 2.0, 1.5),
                                    sched(4, 4, 9)};
  for (const auto& s : variants) {
    auto prev = phase_weights(0, s);
    for (int e = 1; e <= s.total_epochs; ++e) {
      const auto cur = phase_weights(e, s);
      for (int i = 0; i < 3; ++i) EXPECT_GE(cur[i], prev[i]) << "epoch " << e;
      prev = cur;
    }
  }
}

TEST(Schedule, LinearRampReachesTargetsAtPhaseEnds) {
  TrainSchedule s = sched(10, 20, 30, 1.0, 2.0, 1.0);
  s.ramp = WeightRamp::Linear;
  expect_weights(9, s, {0.0, 0.0, 0.0});
  expect_weights(10, s, {0.1, 0.2, 0.0});
  expect_weights(14, s, {0.5, 1.0, 0.0});
  expect_weights(19, s, {1.0, 2.0, 0.0});
  expect_weights(20, s, {1.0, 2.0, 0.1});
  expect_weights(29, s, {1.0, 2.0, 1.0});
  expect_weights(30, s, {1.0, 2.0, 1.0});

  auto prev = phase_weights(0, s);
  for (int e = 1; e <= s.total_epochs; ++e) {
    const auto cur = phase_weights(e, s);
    for (int i = 0; i < 3; ++i) EXPECT_GE(cur[i], prev[i]) << "epoch " << e;
    prev = cur;
  }
}

TEST(Schedule, ValidateCollectsEveryViolation) {
  TrainSchedule s = sched(5, 3, 10);
  s.w1_target = -1.0;
  s.batch_size = 0;
  try {
    s.validate();
    FAIL() << "expected validation failure";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("ep1 must be <= ep2"), std::string::npos);
    EXPECT_NE(msg.find("w1_target must be >= 0"), std::string::npos);
    EXPECT_NE(msg.find("batch_size must be >= 1"), std::string::npos);
  }
  EXPECT_THROW(sched(0, 0, 0).validate(), ConfigError);
  TrainSchedule past_end = sched(2, 3, 9);
  past_end.total_epochs = 8;
  EXPECT_THROW(past_end.validate(), ConfigError);
  EXPECT_NO_THROW(sched(1, 1, 1).validate());
}

TEST(LossMask, AblationVariantsZeroTheRightTerms) {
  const std::array<real, 3> w{0.7, 0.9, 1.1};
  const auto net1 = apply_mask(w, LossMask::gan_only());
  EXPECT_EQ(net1, (std::array<real, 3>{0.0, 0.0, 0.0}));
  const auto net2 = apply_mask(w, LossMask::no_reconstruction());
  EXPECT_EQ(net2, (std::array<real, 3>{0.7, 0.9, 0.0}));
  const auto net3 = apply_mask(w, LossMask::full());
  EXPECT_EQ(net3, w);
}

}  // namespace
}  // namespace scgan

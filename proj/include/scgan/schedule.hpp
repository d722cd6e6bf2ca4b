#pragma once

#include <array>
#include <string>
#include <vector>

#include "scgan/common.hpp"

namespace scgan {

enum class WeightRamp { Step, Linear };

// Three-phase consistency-weight schedule: phase 1 trains with the
// adversarial loss alone, phase 2 adds the clean and pure-noise terms, phase
// 3 adds the reconstruction term.
struct TrainSchedule {
  int ep1 = 10;
  int ep2 = 20;
  int ep3 = 40;
  int total_epochs = 40;
  real w1_target = 1.0;
  real w2_target = 1.0;
  real w3_target = 1.0;
  int batch_size = 8;
  real lr_g = 1e-4;
  real lr_d = 1e-4;
  WeightRamp ramp = WeightRamp::Step;

  void validate() const {
    std::vector<std::string> violations;
    if (!(0 < ep1)) violations.push_back("ep1 must be > 0");
    if (!(ep1 <= ep2)) violations.push_back("ep1 must be <= ep2");
    if (!(ep2 <= ep3)) violations.push_back("ep2 must be <= ep3");
    if (!(ep3 <= total_epochs))
      violations.push_back("ep3 must be <= total_epochs");
    if (w1_target < 0.0) violations.push_back("w1_target must be >= 0");
    if (w2_target < 0.0) violations.push_back("w2_target must be >= 0");
    if (w3_target < 0.0) violations.push_back("w3_target must be >= 0");
    if (batch_size < 1) violations.push_back("batch_size must be >= 1");
    if (lr_g <= 0.0) violations.push_back("lr_g must be > 0");
    if (lr_d <= 0.0) violations.push_back("lr_d must be > 0");
    if (!violations.empty())
      throw ConfigError("invalid train schedule", violations);
  }
};

struct PhaseState {
  int epoch = 0;
  int phase = 1;
  real w1 = 0.0, w2 = 0.0, w3 = 0.0;
};

inline int phase_index(int epoch, const TrainSchedule& s) {
  if (epoch < s.ep1) return 1;
  if (epoch < s.ep2) return 2;
  return 3;
}

inline PhaseState phase_state(int epoch, const TrainSchedule& s) {
  check(epoch >= 0 && epoch <= s.total_epochs,
        "phase_state: epoch out of range [0, total_epochs]");
  PhaseState ps;
  ps.epoch = epoch;
  ps.phase = phase_index(epoch, s);
  switch (ps.phase) {
    case 1:
      break;
    case 2:
      ps.w1 = s.w1_target;
      ps.w2 = s.w2_target;
      break;
    default:
      ps.w1 = s.w1_target;
      ps.w2 = s.w2_target;
      ps.w3 = s.w3_target;
      break;
  }
  if (s.ramp == WeightRamp::Linear) {
    // Weights climb linearly across the phase that introduces them instead
    // of jumping, reaching the target at the phase's last epoch.
    if (ps.phase == 2 && s.ep2 - s.ep1 > 1) {
      const real f = static_cast<real>(epoch - s.ep1 + 1) /
                     static_cast<real>(s.ep2 - s.ep1);
      ps.w1 = s.w1_target * f;
      ps.w2 = s.w2_target * f;
    } else if (ps.phase == 3 && epoch < s.ep3 && s.ep3 - s.ep2 > 1) {
      const real f = static_cast<real>(epoch - s.ep2 + 1) /
                     static_cast<real>(s.ep3 - s.ep2);
      ps.w3 = s.w3_target * f;
    }
  }
  return ps;
}

inline std::array<real, 3> phase_weights(int epoch, const TrainSchedule& s) {
  const PhaseState ps = phase_state(epoch, s);
  return {ps.w1, ps.w2, ps.w3};
}

// Ablation switch: which consistency terms participate in the generator
// objective. The adversarial term is always on.
struct LossMask {
  bool clean = true;
  bool pn = true;
  bool rec = true;

  static LossMask gan_only() { return {false, false, false}; }
  static LossMask no_reconstruction() { return {true, true, false}; }
  static LossMask full() { return {true, true, true}; }
};

inline std::array<real, 3> apply_mask(const std::array<real, 3>& w,
                                      const LossMask& m) {
  return {m.clean ? w[0] : 0.0, m.pn ? w[1] : 0.0, m.rec ? w[2] : 0.0};
}

}  // namespace scgan

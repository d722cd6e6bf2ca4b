#pragma once

#include <string>

#include "scgan/common.hpp"
#include "scgan/corpus.hpp"

namespace scgan {

// Embedded copies of presets/*.json; the files ship for reference and tests
// assert they stay in sync. desk: minutes on one CPU core. paper: full-size
// models and patches, for real hardware.
inline const char* desk_preset_text() {
  return R"json({
  "seed": 1,
  "out": "out",
  "channels": 1,
  "corpus_dir": "out/corpus",
  "synth": {
    "kind": "gaussian",
    "sigma": 25.0,
    "sources": 12,
    "source_size": 96,
    "source_range": [60.0, 200.0],
    "patch_size": 32,
    "patches_per_source": 16,
    "split_ratio": 0.5
  },
  "generator": {"depth": 7, "mid_channels": 32, "kernel": 3},
  "schedule": {
    "ep1": 12,
    "ep2": 24,
    "ep3": 48,
    "total_epochs": 48,
    "w1": 1.0,
    "w2": 1.0,
    "w3": 1.0,
    "batch_size": 8,
    "lr_g": 1e-4,
    "lr_d": 1e-4,
    "ramp": "step"
  },
  "train": {"checkpoint_every": 12, "mask": "full", "mean_subtract": false},
  "pairs": {"count": 100},
  "denoiser": {
    "depth": 5,
    "mid_channels": 32,
    "epochs": 40,
    "lr": 1e-3,
    "batch_size": 8,
    "patch_size": 0
  },
  "eval": {"holdout_sources": 4, "holdout_patches": 10}
}
)json";
}

inline const char* paper_preset_text() {
  return R"json({
  "seed": 1,
  "out": "out",
  "channels": 1,
  "corpus_dir": "out/corpus",
  "synth": {
    "kind": "gaussian",
    "sigma": 25.0,
    "sources": 40,
    "source_size": 256,
    "source_range": [60.0, 200.0],
    "patch_size": 128,
    "patches_per_source": 8,
    "split_ratio": 0.5
  },
  "generator": {"depth": 17, "mid_channels": 64, "kernel": 3},
  "schedule": {
    "ep1": 10,
    "ep2": 20,
    "ep3": 40,
    "total_epochs": 40,
    "w1": 1.0,
    "w2": 1.0,
    "w3": 1.0,
    "batch_size": 8,
    "lr_g": 1e-4,
    "lr_d": 1e-4,
    "ramp": "step"
  },
  "train": {"checkpoint_every": 10, "mask": "full", "mean_subtract": false},
  "pairs": {"count": 400},
  "denoiser": {
    "depth": 17,
    "mid_channels": 64,
    "epochs": 50,
    "lr": 1e-3,
    "batch_size": 8,
    "patch_size": 64
  },
  "eval": {"holdout_sources": 8, "holdout_patches": 10}
}
)json";
}

inline json preset_document(const std::string& name) {
  if (name == "desk") return json::parse(desk_preset_text());
  if (name == "paper") return json::parse(paper_preset_text());
  throw ConfigError("unknown preset: " + name,
                    {"preset must be \"desk\" or \"paper\""});
}

}  // namespace scgan

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "scgan/corpus.hpp"
#include "scgan/layers.hpp"

namespace scgan {

// A checkpoint is a directory holding `checkpoint.json` (metadata plus an
// index of named arrays) and `params.bin` (the arrays' float64 payload,
// little-endian, concatenated in index order). Binary storage keeps resumed
// runs bit-identical to uninterrupted ones.
inline void save_checkpoint(const std::filesystem::path& dir, json meta,
                            const std::vector<ArrayRef>& arrays) {
  std::filesystem::create_directories(dir);
  json index = json::array();
  std::size_t offset = 0;
  for (const auto& a : arrays) {
    index.push_back({{"name", a.name}, {"offset", offset}, {"size", a.size}});
    offset += a.size;
  }
  meta["arrays"] = index;

  std::ofstream bin(dir / "params.bin", std::ios::binary);
  if (!bin) throw IoError("cannot write " + (dir / "params.bin").string());
  for (const auto& a : arrays) {
    bin.write(reinterpret_cast<const char*>(a.data),
              static_cast<std::streamsize>(a.size * sizeof(real)));
  }
  if (!bin) throw IoError("write failed: " + (dir / "params.bin").string());
  bin.close();

  detail::write_file(dir / "checkpoint.json", meta.dump(2) + "\n");
}

// Newest checkpoint under a training run's checkpoints/ directory. Names are
// epoch_%04d, so lexicographic order is epoch order.
inline std::filesystem::path latest_checkpoint(
    const std::filesystem::path& checkpoints_dir) {
  std::filesystem::path best;
  if (std::filesystem::is_directory(checkpoints_dir)) {
    for (const auto& entry :
         std::filesystem::directory_iterator(checkpoints_dir)) {
      if (!entry.is_directory()) continue;
      const auto name = entry.path().filename().string();
      if (name.rfind("epoch_", 0) != 0) continue;
      if (best.empty() || name > best.filename().string())
        best = entry.path();
    }
  }
  if (best.empty())
    throw CheckpointError("missing checkpoint: no epoch_* directory under " +
                          checkpoints_dir.string());
  return best;
}

inline json read_checkpoint_meta(const std::filesystem::path& dir) {
  const auto meta_path = dir / "checkpoint.json";
  if (!std::filesystem::exists(meta_path))
    throw CheckpointError("missing checkpoint: " + meta_path.string());
  return detail::read_json(meta_path);
}

// Fills the given arrays from the checkpoint payload, matching by name.
// Every requested array must be present with the recorded size.
inline void load_checkpoint_arrays(const std::filesystem::path& dir,
                                   const json& meta,
                                   const std::vector<ArrayRef>& arrays) {
  const auto bin_path = dir / "params.bin";
  if (!std::filesystem::exists(bin_path))
    throw CheckpointError("missing checkpoint payload: " + bin_path.string());
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw CheckpointError("cannot open " + bin_path.string());

  const json& index = meta.at("arrays");
  for (const auto& a : arrays) {
    const json* entry = nullptr;
    for (const auto& e : index) {
      if (e.at("name").get<std::string>() == a.name) {
        entry = &e;
        break;
      }
    }
    if (!entry)
      throw CheckpointError("checkpoint lacks array: " + a.name);
    if (entry->at("size").get<std::size_t>() != a.size)
      throw CheckpointError("checkpoint array size mismatch for " + a.name);
    bin.seekg(static_cast<std::streamoff>(
        entry->at("offset").get<std::size_t>() * sizeof(real)));
    bin.read(reinterpret_cast<char*>(a.data),
             static_cast<std::streamsize>(a.size * sizeof(real)));
    if (bin.gcount() != static_cast<std::streamsize>(a.size * sizeof(real)))
      throw CheckpointError("truncated checkpoint payload at " + a.name);
  }
}

}  // namespace scgan

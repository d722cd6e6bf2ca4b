#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scgan/common.hpp"
#include "scgan/image.hpp"

namespace scgan {

using json = nlohmann::ordered_json;

// Unpaired training material: noisy patches and clean patches with disjoint
// content. Provenance carries the seed and synthesis parameters needed to
// regenerate the corpus.
struct UnpairedCorpus {
  std::vector<ImagePatch> noisy;
  std::vector<ImagePatch> clean;
  json provenance;
};

struct ImagePair {
  ImagePatch noisy;
  ImagePatch clean;
  NoiseMap noise;
};

// Constructed pairs: noisy = clip(clean + noise) with the pre-clip noise map
// recorded. The recorded map is stored as the floating-point difference
// (clean + noise) - clean, so noisy - clean reproduces it bit-for-bit at
// pixels the clip did not touch.
struct PairedCorpus {
  std::vector<ImagePair> pairs;
  json provenance;
};

namespace detail {

inline std::string index_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04zu", i);
  return buf;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace detail

static_assert(std::endian::native == std::endian::little,
              "raw noise maps are written little-endian");

inline void save_noise_raw(const NoiseMap& m, const std::filesystem::path& base) {
  std::vector<float> buf(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    buf[i] = static_cast<float>(m[i]);
  std::ofstream out(base.string() + ".raw", std::ios::binary);
  if (!out) throw IoError("cannot write " + base.string() + ".raw");
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw IoError("write failed: " + base.string() + ".raw");

  json side;
  side["shape"] = {m.channels(), m.height(), m.width()};
  side["dtype"] = "f32le";
  side["layout"] = "chw";
  detail::write_file(base.string() + ".json", side.dump(2) + "\n");
}

inline NoiseMap load_noise_raw(const std::filesystem::path& base) {
  const json side = detail::read_json(base.string() + ".json");
  const auto shape = side.at("shape");
  check(shape.size() == 3, "noise sidecar: shape must have 3 entries");
  NoiseMap m(shape[1].get<int>(), shape[2].get<int>(), shape[0].get<int>());
  std::ifstream in(base.string() + ".raw", std::ios::binary);
  if (!in) throw IoError("cannot open " + base.string() + ".raw");
  std::vector<float> buf(m.size());
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
    throw IoError("truncated noise file: " + base.string() + ".raw");
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = buf[i];
  return m;
}

inline void save_unpaired(const UnpairedCorpus& c,
                          const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "noisy");
  fs::create_directories(dir / "clean");
  for (std::size_t i = 0; i < c.noisy.size(); ++i)
    save_patch(c.noisy[i], (dir / "noisy" / (detail::index_name(i) + ".png")).string());
  for (std::size_t i = 0; i < c.clean.size(); ++i)
    save_patch(c.clean[i], (dir / "clean" / (detail::index_name(i) + ".png")).string());
  json manifest = c.provenance;
  manifest["noisy_count"] = c.noisy.size();
  manifest["clean_count"] = c.clean.size();
  detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

inline UnpairedCorpus load_unpaired(const std::filesystem::path& dir) {
  UnpairedCorpus c;
  c.provenance = detail::read_json(dir / "manifest.json");
  const auto noisy_count = c.provenance.at("noisy_count").get<std::size_t>();
  const auto clean_count = c.provenance.at("clean_count").get<std::size_t>();
  c.noisy.reserve(noisy_count);
  c.clean.reserve(clean_count);
  for (std::size_t i = 0; i < noisy_count; ++i)
    c.noisy.push_back(load_patch((dir / "noisy" / (detail::index_name(i) + ".png")).string()));
  for (std::size_t i = 0; i < clean_count; ++i)
    c.clean.push_back(load_patch((dir / "clean" / (detail::index_name(i) + ".png")).string()));
  return c;
}

inline void save_paired(const PairedCorpus& c,
                        const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "pairs");
  for (std::size_t i = 0; i < c.pairs.size(); ++i) {
    const std::string stem = detail::index_name(i);
    save_patch(c.pairs[i].noisy, (dir / "pairs" / (stem + "_noisy.png")).string());
    save_patch(c.pairs[i].clean, (dir / "pairs" / (stem + "_clean.png")).string());
    save_noise_raw(c.pairs[i].noise, dir / "pairs" / (stem + "_noise"));
  }
  json manifest = c.provenance;
  manifest["pair_count"] = c.pairs.size();
  detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

inline PairedCorpus load_paired(const std::filesystem::path& dir) {
  PairedCorpus c;
  c.provenance = detail::read_json(dir / "manifest.json");
  const auto count = c.provenance.at("pair_count").get<std::size_t>();
  c.pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string stem = detail::index_name(i);
    ImagePair p{
        load_patch((dir / "pairs" / (stem + "_noisy.png")).string()),
        load_patch((dir / "pairs" / (stem + "_clean.png")).string()),
        load_noise_raw(dir / "pairs" / (stem + "_noise"))};
    c.pairs.push_back(std::move(p));
  }
  return c;
}

}  // namespace scgan

// Copyright 2026 The msfdpm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msfdpm/fmap_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "json.hpp"
#include "msfdpm/error.h"

namespace msfdpm {
namespace {

using nlohmann::json;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[at + b]) << (8 * b);
  return v;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

constexpr const char* kPyramidFormat = "msfdpm-pyramid";

}  // namespace

std::vector<std::uint8_t> encode_fmap(const FeatureMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(kFmapHeaderBytes + map.size() * 4);
  out.insert(out.end(), std::begin(kFmapMagic), std::end(kFmapMagic));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.channels()));
  for (double v : map.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

FeatureMap decode_fmap(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFmapHeaderBytes ||
      !std::equal(std::begin(kFmapMagic), std::end(kFmapMagic), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw InvalidInputError("not an FMAP1 container");
  }
  const std::uint32_t h = get_u32(bytes, 5);
  const std::uint32_t w = get_u32(bytes, 9);
  const std::uint32_t c = get_u32(bytes, 13);
  if (h == 0 || w == 0 || c == 0 || h > (1u << 20) || w > (1u << 20) || c > (1u << 16)) {
    throw InvalidInputError("FMAP1 dims out of range");
  }
  const std::uint64_t count = static_cast<std::uint64_t>(h) * w * c;
  if (bytes.size() != kFmapHeaderBytes + count * 4) {
    throw InvalidInputError("FMAP1 payload is " + std::to_string(bytes.size() - kFmapHeaderBytes) +
                            " bytes, dims require " + std::to_string(count * 4));
  }
  std::vector<double> data(count);
  for (std::uint64_t n = 0; n < count; ++n) {
    const float v = std::bit_cast<float>(get_u32(bytes, kFmapHeaderBytes + 4 * n));
    if (!std::isfinite(v)) throw InvalidInputError("FMAP1 holds a non-finite value");
    data[n] = v;
  }
  return FeatureMap(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c),
                    std::move(data));
}

void write_fmap(const std::filesystem::path& path, const FeatureMap& map) {
  const auto bytes = encode_fmap(map);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidInputError("short write to " + path.string());
}

FeatureMap read_fmap(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return decode_fmap(bytes);
}

void write_pyramid_bundle(const std::filesystem::path& dir, const FeaturePyramid& pyramid) {
  std::filesystem::create_directories(dir);
  json manifest = {{"format", kPyramidFormat},
                   {"version", 1},
                   {"base_height", pyramid.base_height()},
                   {"base_width", pyramid.base_width()},
                   {"channels", pyramid.channels()},
                   {"levels", json::array()}};
  for (int h = 1; h <= kPyramidLevels; ++h) {
    const std::string name = "level" + std::to_string(h) + ".fmap";
    write_fmap(dir / name, pyramid.level(h));
    manifest["levels"].push_back(name);
  }
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

FeaturePyramid read_pyramid_bundle(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw InvalidInputError("no manifest.json in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInputError("bad pyramid manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != kPyramidFormat || !manifest.contains("levels") ||
      !manifest["levels"].is_array() || manifest["levels"].size() != kPyramidLevels) {
    throw InvalidInputError(dir.string() + " is not a pyramid bundle");
  }
  std::array<FeatureMap, kPyramidLevels> levels;
  for (int h = 0; h < kPyramidLevels; ++h) {
    levels[h] = read_fmap(dir / manifest["levels"][h].get<std::string>());
  }
  return FeaturePyramid(std::move(levels));
}

}  // namespace msfdpm

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

#include "msfdpm/weights_io.h"

#include <fstream>
#include <map>
#include <string>
#include <utility>

#include "json.hpp"
#include "msfdpm/error.h"
#include "msfdpm/fmap_io.h"

namespace msfdpm {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kWeightsFormat = "msfdpm-weights";

void put_stage(const fs::path& dir, json& stages, const std::string& name,
               const ConvStage& stage) {
  const int k = stage.kernel_size();
  const std::string kernel_file = name + ".kernel.fmap";
  const std::string bias_file = name + ".bias.fmap";
  write_fmap(dir / kernel_file,
             FeatureMap(stage.out_channels(), stage.in_channels(), k * k,
                        std::vector<double>(stage.kernel().begin(), stage.kernel().end())));
  write_fmap(dir / bias_file,
             FeatureMap(stage.out_channels(), 1, 1,
                        std::vector<double>(stage.bias().begin(), stage.bias().end())));
  stages.push_back({{"name", name},
                    {"out", stage.out_channels()},
                    {"in", stage.in_channels()},
                    {"k", k},
                    {"resample", to_string(stage.resample())},
                    {"activation", stage.leaky_slope() ? "leaky" : "linear"},
                    {"kernel", kernel_file},
                    {"bias", bias_file}});
}

void put_block(const fs::path& dir, json& stages, const std::string& name,
               const ResidualBlock& block) {
  put_stage(dir, stages, name + ".conv1", block.first());
  put_stage(dir, stages, name + ".conv2", block.second());
  if (block.skip()) put_stage(dir, stages, name + ".skip", *block.skip());
}

class StageReader {
 public:
  StageReader(fs::path dir, const json& manifest, double slope) : dir_(std::move(dir)), slope_(slope) {
    for (const auto& s : manifest.at("stages")) entries_[s.at("name").get<std::string>()] = s;
  }

  bool has(const std::string& name) const { return entries_.count(name) != 0; }

  ConvStage get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("weights bundle lacks stage " + name);
    const json& s = it->second;
    const int out = s.at("out").get<int>();
    const int in = s.at("in").get<int>();
    const int k = s.at("k").get<int>();
    FeatureMap kernel = read_fmap(dir_ / s.at("kernel").get<std::string>());
    FeatureMap bias = read_fmap(dir_ / s.at("bias").get<std::string>());
    if (kernel.height() != out || kernel.width() != in || kernel.channels() != k * k) {
      throw ConfigError("stage " + name + " kernel file shape disagrees with the manifest");
    }
    if (bias.height() != out || bias.width() != 1 || bias.channels() != 1) {
      throw ConfigError("stage " + name + " bias file shape disagrees with the manifest");
    }
    const std::string activation = s.at("activation").get<std::string>();
    if (activation != "leaky" && activation != "linear") {
      throw ConfigError("stage " + name + " has unknown activation " + activation);
    }
    std::optional<double> slope;
    if (activation == "leaky") slope = slope_;
    auto kv = kernel.values();
    auto bv = bias.values();
    return ConvStage(out, in, k, resample_from_string(s.at("resample").get<std::string>()), slope,
                     std::vector<double>(kv.begin(), kv.end()),
                     std::vector<double>(bv.begin(), bv.end()));
  }

  ResidualBlock block(const std::string& name) const {
    std::optional<ConvStage> skip;
    if (has(name + ".skip")) skip = get(name + ".skip");
    return ResidualBlock(get(name + ".conv1"), get(name + ".conv2"), std::move(skip));
  }

 private:
  fs::path dir_;
  double slope_;
  std::map<std::string, json> entries_;
};

}  // namespace

ModelWeights seeded_model_weights(std::uint64_t seed, int channels, double step) {
  return ModelWeights{seeded_reference_weights(seed, channels),
                      seeded_fusion_weights(seed ^ kFusionSeedSalt, channels), step};
}

void write_weights_bundle(const fs::path& dir, const ModelWeights& weights) {
  weights.codec.validate();
  weights.fusion.validate();
  fs::create_directories(dir);
  json stages = json::array();
  const CodecWeights& c = weights.codec;
  for (int s = 0; s < 4; ++s) put_stage(dir, stages, "encoder." + std::to_string(s), c.encoder[s]);
  for (int s = 0; s < 4; ++s) put_stage(dir, stages, "decoder." + std::to_string(s), c.decoder[s]);
  put_stage(dir, stages, "head", c.head[0]);
  for (int s = 0; s < 4; ++s) {
    put_stage(dir, stages, "extractor." + std::to_string(s), c.extractor[s]);
  }
  for (int h = kPyramidLevels; h >= 1; --h) {
    const std::string prefix = "fusion.level" + std::to_string(h);
    put_block(dir, stages, prefix + ".block1", weights.fusion.levels[h - 1].first);
    put_block(dir, stages, prefix + ".block2", weights.fusion.levels[h - 1].second);
  }
  put_stage(dir, stages, "fusion.head", weights.fusion.head[0]);

  json manifest = {{"format", kWeightsFormat},
                   {"version", 1},
                   {"channels", c.channels},
                   {"leaky_slope", kLeakySlope},
                   {"q", weights.step},
                   {"provenance", c.provenance},
                   {"fusion_provenance", weights.fusion.provenance},
                   {"stages", stages}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw InvalidInputError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

ModelWeights read_weights_bundle(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw InvalidInputError("no manifest.json in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInputError("bad weights manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != kWeightsFormat) {
    throw InvalidInputError(dir.string() + " is not a weights bundle");
  }
  try {
    const int channels = manifest.at("channels").get<int>();
    const StageReader reader(dir, manifest, manifest.value("leaky_slope", kLeakySlope));
    ModelWeights w;
    w.step = manifest.value("q", 1.0);
    w.codec.channels = channels;
    w.codec.provenance = manifest.value("provenance", dir.string());
    for (int s = 0; s < 4; ++s) w.codec.encoder.push_back(reader.get("encoder." + std::to_string(s)));
    for (int s = 0; s < 4; ++s) w.codec.decoder.push_back(reader.get("decoder." + std::to_string(s)));
    w.codec.head.push_back(reader.get("head"));
    for (int s = 0; s < 4; ++s) {
      w.codec.extractor.push_back(reader.get("extractor." + std::to_string(s)));
    }
    w.fusion.channels = channels;
    w.fusion.provenance = manifest.value("fusion_provenance", dir.string());
    std::vector<std::optional<FusionLevelWeights>> levels(kPyramidLevels);
    for (int h = kPyramidLevels; h >= 1; --h) {
      const std::string prefix = "fusion.level" + std::to_string(h);
      levels[h - 1].emplace(
          FusionLevelWeights{reader.block(prefix + ".block1"), reader.block(prefix + ".block2")});
    }
    for (auto& level : levels) w.fusion.levels.push_back(std::move(*level));
    w.fusion.head.push_back(reader.get("fusion.head"));
    w.codec.validate();
    w.fusion.validate();
    if (!(w.step > 0)) throw ConfigError("weights bundle has a non-positive q");
    return w;
  } catch (const json::exception& e) {
    throw ConfigError("weights manifest is incomplete: " + std::string(e.what()));
  }
}

}  // namespace msfdpm

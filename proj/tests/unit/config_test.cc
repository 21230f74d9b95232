// Copyright 2026 The sedkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <functional>

#include <gtest/gtest.h>

#include "sed/config.h"
#include "sed/error.h"
#include "tempdir.h"

namespace sed {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ConfigError(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    return e.what();
  }
  ADD_FAILURE() << "no error";
  return "";
}

TEST(Config, ShippedFilesParse) {
  const SynthConfig s = ParseSynthConfig(ReadJsonFile(fs::path(SEDKIT_DOCS_DIR) / "synth_config.json"));
  EXPECT_EQ(s.sampling.sample_rate, 16000);
  EXPECT_EQ(s.catalog.MakeVocabulary().size(), 3u);
  const TrainingSetup t = ParseTrainingSetup(ReadJsonFile(fs::path(SEDKIT_DOCS_DIR) / "train_config.json"));
  EXPECT_EQ(t.model.conv.size(), 3u);
  EXPECT_EQ(t.model.conv[0].freq_pool, 5);
  EXPECT_EQ(t.model.gru, std::vector<int>{16});
  EXPECT_TRUE(t.model.dense.empty());
  EXPECT_EQ(t.train.batch_size, 8);
  EXPECT_FALSE(t.features.fmax.has_value());
  EXPECT_FALSE(t.search.has_value());
}

TEST(Config, FeatureBlock) {
  FeatureConfig f = ParseFeatureConfig(json::parse(R"({"n_mels": 64, "fmax": 7000})"));
  EXPECT_EQ(f.n_mels, 64);
  EXPECT_EQ(f.fmax, 7000.0);
  EXPECT_EQ(f.hop_len_s, 0.020);
  const FeatureConfig back = ParseFeatureConfig(FeatureConfigToJson(f));
  EXPECT_EQ(back.n_mels, 64);
  EXPECT_EQ(back.fmax, f.fmax);
  EXPECT_FALSE(ParseFeatureConfig(json::parse(R"({"fmax": null})")).fmax.has_value());
  EXPECT_NE(ConfigError([] { ParseFeatureConfig(json::parse(R"({"n_mel": 40})")); }).find("n_mel"),
            std::string::npos);
  ConfigError([] { ParseFeatureConfig(json::parse(R"({"n_mels": "forty"})")); });
}

TEST(Config, UnknownKeysAreNamed) {
  json j = ReadJsonFile(fs::path(SEDKIT_DOCS_DIR) / "train_config.json");
  j["train"]["learning_rate"] = 0.1;
  EXPECT_NE(ConfigError([&] { ParseTrainingSetup(j); }).find("train.learning_rate"),
            std::string::npos);
  json s = ReadJsonFile(fs::path(SEDKIT_DOCS_DIR) / "synth_config.json");
  s["catalog"][1]["freq"] = 1.0;
  EXPECT_NE(ConfigError([&] { ParseSynthConfig(s); }).find("freq"), std::string::npos);
}

TEST(Config, SynthValidation) {
  const json base = ReadJsonFile(fs::path(SEDKIT_DOCS_DIR) / "synth_config.json");
  json j = base;
  j["splits"] = {{"train", 0.5}, {"val", 0.2}, {"test", 0.2}};
  EXPECT_THROW(ParseSynthConfig(j), Error);
  j = base;
  j.erase("catalog");
  EXPECT_NE(ConfigError([&] { ParseSynthConfig(j); }).find("catalog"), std::string::npos);
  j = base;
  j["background"] = {{"kind", "wav_snippet"}, {"level", 0.1}};
  EXPECT_NE(ConfigError([&] { ParseSynthConfig(j); }).find("wav_path"), std::string::npos);
  j = base;
  j["catalog"][0]["kind"] = "whistle";
  EXPECT_THROW(ParseSynthConfig(j), Error);
  j = base;
  j["catalog"][2].erase("label");
  EXPECT_TRUE(ParseSynthConfig(j).catalog.MakeVocabulary().Contains("noise_burst"));
}

TEST(Config, SearchBlock) {
  json j = ReadJsonFile(fs::path(SEDKIT_DOCS_DIR) / "train_config.json");
  j["search"] = {{"n_trials", 3}, {"epochs_per_trial", 2}, {"log10_lr", {-2, -1}},
                 {"batch_sizes", {4}}};
  const TrainingSetup t = ParseTrainingSetup(j);
  ASSERT_TRUE(t.search.has_value());
  EXPECT_EQ(t.search_trials, 3);
  EXPECT_EQ(t.search_epochs, 2);
  EXPECT_EQ(t.search->log10_lr, std::make_pair(-2.0, -1.0));
  EXPECT_EQ(t.search->batch_sizes, std::vector<int>{4});
  j["search"]["log10_lr"] = {-2};
  ConfigError([&] { ParseTrainingSetup(j); });
  j["search"].erase("log10_lr");
  j["search"].erase("n_trials");
  ConfigError([&] { ParseTrainingSetup(j); });
}

TEST(Config, ReadJsonFileErrors) {
  sedtest::TempDir tmp;
  {
    std::ofstream(tmp / "bad.json") << "{\"a\": ";
  }
  ConfigError([&] { ReadJsonFile(tmp / "bad.json"); });
  EXPECT_THROW(ReadJsonFile(tmp / "absent.json"), Error);
}

}  // namespace
}  // namespace sed

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

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sed/annotations.h"
#include "sed/audio_io.h"
#include "sed/config.h"
#include "sed/features.h"
#include "tempdir.h"

namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Runs sedtool with `args`; stdout and stderr land in `log`.
int Sedtool(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(SEDTOOL_PATH) + " " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Q(const fs::path& p) { return "'" + p.string() + "'"; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    Put(tmp_ / "synth.json", R"({
      "sample_rate": 16000, "duration_s": 3.0,
      "background": {"kind": "white_noise", "level": 0.01},
      "events": {"min": 1, "max": 2}, "max_polyphony": 2,
      "catalog": [
        {"id": "t", "kind": "tone_burst", "label": "tone", "duration_s": 0.6, "frequency_hz": 500},
        {"id": "n", "kind": "noise_burst", "label": "noise", "duration_s": 0.5}
      ]})");
    Put(tmp_ / "train.json", R"({
      "model": {"conv": [{"filters": 4, "kernel_h": 3, "kernel_w": 3, "freq_pool": 5},
                         {"filters": 4, "kernel_h": 3, "kernel_w": 3, "freq_pool": 8}],
                "gru": [4], "dense": [], "keep_prob": 0.9},
      "train": {"batch_size": 2, "max_epochs": 2, "crop_len_T": 100}})");
  }
  int Run(const std::string& args) { return Sedtool(args, tmp_ / "log.txt"); }
  std::string Log() { return Slurp(tmp_ / "log.txt"); }

  // Four scenes with a fixed train/val/test assignment.
  fs::path SmallDataset(const std::string& name = "data") {
    const fs::path d = tmp_ / name;
    EXPECT_EQ(Run("synth --config " + Q(tmp_ / "synth.json") + " --out-dir " + Q(d) +
                  " --num-scenes 4 --seed 3"),
              0)
        << Log();
    Put(d / "manifest.tsv",
        "scene_0000\ttrain\nscene_0001\ttrain\nscene_0002\tval\nscene_0003\ttest\n");
    return d;
  }

  sedtest::TempDir tmp_;
};

TEST_F(Cli, NoArgumentsIsUsageError) {
  EXPECT_EQ(Run(""), 1);
  EXPECT_EQ(Run("frobnicate"), 1);
  EXPECT_EQ(Run("--help"), 0);
}

TEST_F(Cli, SynthZeroScenesAndDeterminism) {
  EXPECT_EQ(Run("synth --config " + Q(tmp_ / "synth.json") + " --out-dir " + Q(tmp_ / "z") +
                " --num-scenes 0"),
            0)
      << Log();
  EXPECT_EQ(Slurp(tmp_ / "z" / "manifest.tsv"), "");
  for (const char* d : {"a", "b"}) {
    EXPECT_EQ(Run("synth --config " + Q(tmp_ / "synth.json") + " --out-dir " + Q(tmp_ / d) +
                  " --num-scenes 2 --seed 9"),
              0);
  }
  EXPECT_EQ(Slurp(tmp_ / "a" / "audio" / "scene_0001.wav"),
            Slurp(tmp_ / "b" / "audio" / "scene_0001.wav"));
  EXPECT_EQ(Slurp(tmp_ / "a" / "manifest.tsv"), Slurp(tmp_ / "b" / "manifest.tsv"));

  std::string bad = Slurp(tmp_ / "synth.json");
  bad.insert(bad.find('{') + 1, R"("splits": {"train": 0.9, "val": 0.2, "test": 0.2},)");
  Put(tmp_ / "bad.json", bad);
  EXPECT_EQ(Run("synth --config " + Q(tmp_ / "bad.json") + " --out-dir " + Q(tmp_ / "c") +
                " --num-scenes 1"),
            1);
  EXPECT_EQ(Run("synth --config " + Q(tmp_ / "missing.json") + " --out-dir " + Q(tmp_ / "c") +
                " --num-scenes 1"),
            2);
}

TEST_F(Cli, Features) {
  const fs::path d = SmallDataset();
  EXPECT_EQ(Run("features --input " + Q(d / "audio" / "scene_0000.wav") + " --output " +
                Q(tmp_ / "one.sedf")),
            0)
      << Log();
  const sed::FeatureMatrix f = sed::ReadSedf(tmp_ / "one.sedf");
  EXPECT_EQ(f.num_bands(), 40u);
  EXPECT_EQ(f.num_frames(), 149u);
  EXPECT_EQ(Run("features --input " + Q(d / "audio") + " --output " + Q(tmp_ / "feats")), 0);
  EXPECT_EQ(sed::ReadSedf(tmp_ / "feats" / "scene_0000.sedf").values.data, f.values.data);
  EXPECT_TRUE(fs::exists(tmp_ / "feats" / "scene_0003.sedf"));

  Put(d / "audio" / "broken.wav", "RIFF nonsense");
  EXPECT_EQ(Run("features --input " + Q(d / "audio") + " --output " + Q(tmp_ / "feats2")), 2);
  EXPECT_NE(Log().find("broken.wav"), std::string::npos);
  EXPECT_TRUE(fs::exists(tmp_ / "feats2" / "scene_0001.sedf"));
}

TEST_F(Cli, TrainPredictEvaluate) {
  const fs::path d = SmallDataset();
  const std::string train = "train --data " + Q(d) + " --config " + Q(tmp_ / "train.json") +
                            " --seed 5 --model-out ";
  ASSERT_EQ(Run(train + Q(tmp_ / "m1.sedm")), 0) << Log();
  EXPECT_NE(Log().find("epoch 1"), std::string::npos);
  ASSERT_EQ(Run(train + Q(tmp_ / "m2.sedm")), 0);
  EXPECT_EQ(Slurp(tmp_ / "m1.sedm"), Slurp(tmp_ / "m2.sedm"));
  const std::string hist = Slurp(tmp_ / "m1.sedm.history.tsv");
  EXPECT_EQ(hist, Slurp(tmp_ / "m2.sedm.history.tsv"));
  EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), 3);

  EXPECT_EQ(Run(train + Q(tmp_ / "m3.sedm") + " --resume " + Q(tmp_ / "m1.sedm")), 0) << Log();
  Put(tmp_ / "junk.sedm", "SEDM garbage");
  EXPECT_EQ(Run(train + Q(tmp_ / "m4.sedm") + " --resume " + Q(tmp_ / "junk.sedm")), 2);

  // Silence in, no events out.
  sed::AudioClip quiet;
  quiet.sample_rate = 16000;
  quiet.samples.assign(32000, 0.0);
  fs::create_directories(tmp_ / "quiet");
  sed::WriteWav(quiet, tmp_ / "quiet" / "q.wav");
  ASSERT_EQ(Run("predict --model " + Q(tmp_ / "m1.sedm") + " --input " + Q(tmp_ / "quiet") +
                " --out-dir " + Q(tmp_ / "pq") + " --threshold 0.999999 --emit-probs"),
            0)
      << Log();
  EXPECT_EQ(Run("predict --model " + Q(tmp_ / "m1.sedm") + " --input " + Q(tmp_ / "quiet") +
                " --out-dir " + Q(tmp_ / "pq1") + " --threshold 1.0"),
            1);
  EXPECT_EQ(Slurp(tmp_ / "pq" / "q.tsv"), "");
  const sed::FeatureMatrix probs = sed::ReadSedf(tmp_ / "pq" / "q.probs.sedf");
  EXPECT_EQ(probs.num_bands(), 2u);
  EXPECT_EQ(probs.num_frames(), 99u);

  EXPECT_EQ(Run("predict --model " + Q(tmp_ / "m1.sedm") + " --input " + Q(d / "audio") +
                " --out-dir " + Q(tmp_ / "pred")),
            0);
  EXPECT_EQ(Run("predict --model " + Q(tmp_ / "m1.sedm") + " --input " + Q(d / "audio") +
                " --out-dir " + Q(tmp_ / "pv") + " --vocabulary " + Q(tmp_ / "voc.txt")),
            2);
  Put(tmp_ / "voc.txt", "noise\ntone\n");
  EXPECT_EQ(Run("predict --model " + Q(tmp_ / "m1.sedm") + " --input " + Q(d / "audio") +
                " --out-dir " + Q(tmp_ / "pv") + " --vocabulary " + Q(tmp_ / "voc.txt")),
            2);

  EXPECT_EQ(Run("evaluate --ref " + Q(d / "meta") + " --est " + Q(d / "meta") + " --report " +
                Q(tmp_ / "r.tsv")),
            0)
      << Log();
  const std::string report = Slurp(tmp_ / "r.tsv");
  EXPECT_NE(report.find("\t1.000000\t0.000000"), std::string::npos) << report;
  EXPECT_EQ(Run("evaluate --mode event --collar 0.2 --offset-condition --ref " + Q(d / "meta") +
                " --est " + Q(d / "meta")),
            0);
  EXPECT_EQ(Run("evaluate --ref " + Q(d / "meta") + " --est " + Q(tmp_ / "pred")), 0) << Log();
  fs::remove(tmp_ / "pred" / "scene_0002.tsv");
  EXPECT_NE(Run("evaluate --ref " + Q(d / "meta") + " --est " + Q(tmp_ / "pred")), 0);
  EXPECT_NE(Log().find("scene_0002"), std::string::npos);
}

TEST_F(Cli, TrainNeedsBothSplits) {
  const fs::path d = SmallDataset();
  Put(d / "manifest.tsv", "scene_0000\ttrain\nscene_0001\ttest\n");
  EXPECT_EQ(Run("train --data " + Q(d) + " --config " + Q(tmp_ / "train.json") +
                " --model-out " + Q(tmp_ / "m.sedm")),
            1);
}

TEST_F(Cli, Augment) {
  const fs::path d = SmallDataset();
  ASSERT_EQ(Run("augment --input " + Q(d) + " --out-dir " + Q(tmp_ / "s1") + " --ops stretch:1.0"),
            0)
      << Log();
  EXPECT_EQ(sed::ReadEventList(tmp_ / "s1" / "meta" / "scene_0001.tsv"),
            sed::ReadEventList(d / "meta" / "scene_0001.tsv"));
  EXPECT_EQ(Slurp(tmp_ / "s1" / "manifest.tsv"), Slurp(d / "manifest.tsv"));

  ASSERT_EQ(Run("augment --input " + Q(d) + " --out-dir " + Q(tmp_ / "s2") + " --ops stretch:2.0"),
            0);
  const sed::EventList orig = sed::ReadEventList(d / "meta" / "scene_0001.tsv");
  const sed::EventList twice = sed::ReadEventList(tmp_ / "s2" / "meta" / "scene_0001.tsv");
  ASSERT_EQ(orig.size(), twice.size());
  for (size_t i = 0; i < orig.size(); ++i) {
    EXPECT_NEAR(twice[i].onset_s, 2 * orig[i].onset_s, 1e-3);
    EXPECT_NEAR(twice[i].offset_s, 2 * orig[i].offset_s, 1e-3);
  }
  EXPECT_NEAR(sed::ReadWav(tmp_ / "s2" / "audio" / "scene_0001.wav").samples.size(), 96000, 2);

  for (const char* out : {"n1", "n2"}) {
    ASSERT_EQ(Run("augment --input " + Q(d) + " --out-dir " + Q(tmp_ / out) +
                  " --ops noise:10,blockmix --seed 4"),
              0)
        << Log();
  }
  EXPECT_EQ(Slurp(tmp_ / "n1" / "audio" / "scene_0002.wav"),
            Slurp(tmp_ / "n2" / "audio" / "scene_0002.wav"));
  EXPECT_NE(Slurp(tmp_ / "n1" / "audio" / "scene_0002.wav"),
            Slurp(d / "audio" / "scene_0002.wav"));
  EXPECT_EQ(Run("augment --input " + Q(d) + " --out-dir " + Q(tmp_ / "x") + " --ops wobble"), 1);
}

}  // namespace

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

// sedtool: synthesis, feature extraction, training, detection, scoring and
// augmentation from the command line.
//
// Exit codes: 0 ok, 1 usage/config, 2 I/O or format, 3 numeric/training.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sed/annotations.h"
#include "sed/audio_io.h"
#include "sed/augment.h"
#include "sed/config.h"
#include "sed/dataset.h"
#include "sed/error.h"
#include "sed/evaluation.h"
#include "sed/features.h"
#include "sed/fileutil.h"
#include "sed/model.h"
#include "sed/postprocess.h"
#include "sed/trainer.h"

namespace fs = std::filesystem;
using namespace sed;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kParse:
    case ErrorKind::kDomain:
    case ErrorKind::kVocabulary:
    case ErrorKind::kSampling:
    case ErrorKind::kUndefinedMetric:
    case ErrorKind::kEmpty:
    case ErrorKind::kDegenerate:
      return kExitUsage;
    case ErrorKind::kNumeric:
    case ErrorKind::kSearch:
      return kExitNumeric;
    default:
      return kExitIo;
  }
}

// Inputs given as a file or a directory of files with `ext`.
std::vector<fs::path> ExpandInputs(const fs::path& input, const std::string& ext) {
  if (fs::is_directory(input)) return ListFiles(input, ext);
  if (!fs::exists(input)) Fail(ErrorKind::kIo, input.string() + ": no such file");
  return {input};
}

// ---- synth

struct SynthArgs {
  std::string config, out_dir;
  int num_scenes = 0;
  uint64_t seed = 0;
};

int RunSynth(const SynthArgs& a) {
  const SynthConfig cfg = ParseSynthConfig(ReadJsonFile(a.config));
  if (a.num_scenes < 0) Fail(ErrorKind::kConfig, "--num-scenes must be >= 0");
  GenerateDataset(a.out_dir, cfg, a.num_scenes, a.seed);
  std::printf("wrote %d scenes to %s\n", a.num_scenes, a.out_dir.c_str());
  return 0;
}

// ---- features

struct FeaturesArgs {
  std::string input, output, config;
};

int RunFeatures(const FeaturesArgs& a) {
  FeatureConfig cfg;
  if (!a.config.empty()) {
    nlohmann::json j = ReadJsonFile(a.config);
    // Accept either a bare feature block or a training config.
    cfg = j.contains("features") ? ParseFeatureConfig(j.at("features")) : ParseFeatureConfig(j);
  }
  const bool dir_mode = fs::is_directory(a.input);
  const std::vector<fs::path> inputs = ExpandInputs(a.input, ".wav");
  if (dir_mode) fs::create_directories(a.output);
  std::vector<std::string> failures;
  for (const auto& in : inputs) {
    const fs::path out =
        dir_mode ? fs::path(a.output) / (in.stem().string() + ".sedf") : fs::path(a.output);
    try {
      WriteSedf(LogMel(ReadWav(in), cfg), out);
    } catch (const Error& e) {
      failures.push_back(in.string() + ": " + e.what());
    }
  }
  std::printf("%zu of %zu files converted\n", inputs.size() - failures.size(), inputs.size());
  if (!failures.empty()) {
    std::fprintf(stderr, "failed inputs:\n");
    for (const auto& f : failures) std::fprintf(stderr, "  %s\n", f.c_str());
    return kExitIo;
  }
  return 0;
}

// ---- train

struct TrainArgs {
  std::string data, model_out, config, resume, history;
  uint64_t seed = 0;
};

int RunTrain(const TrainArgs& a) {
  TrainingSetup setup;
  if (!a.config.empty()) setup = ParseTrainingSetup(ReadJsonFile(a.config));
  setup.train.seed = a.seed;
  setup.model.seed = a.seed;
  setup.model.n_mels = setup.features.n_mels;

  const fs::path dir = a.data;
  const auto manifest = ReadManifest(dir);
  TrainData data;
  data.vocab = ReadVocabulary(dir / "vocabulary.txt");
  data.features = setup.features;
  data.train = LoadSplit(dir, manifest, "train", setup.features);
  data.val = LoadSplit(dir, manifest, "val", setup.features);
  if (data.train.empty() || data.val.empty()) {
    Fail(ErrorKind::kConfig, "manifest needs non-empty train and val splits");
  }
  setup.model.n_classes = static_cast<int>(data.vocab.size());

  Model resume_model;
  const Model* init = nullptr;
  if (!a.resume.empty()) {
    resume_model = ReadCheckpoint(a.resume);
    setup.model = resume_model.config;
    init = &resume_model;
  }

  if (setup.search && !init) {
    const SearchResult sr = RandomSearch(setup.model, setup.train, *setup.search,
                                         setup.search_trials, a.seed, setup.search_epochs, data);
    for (const auto& t : sr.trials) {
      std::printf("trial %d\tlr=%.6g\tbatch=%d\tval_f1=%.6f\tval_loss=%.6f%s\n", t.index,
                  t.train.initial_lr, t.train.batch_size, t.val_f1, t.val_loss,
                  t.diverged ? "\tdiverged" : "");
    }
    setup.train = sr.best.train;
    setup.model = sr.best.model;
  }

  const TrainResult r = Train(setup.model, data, setup.train, [](const EpochStats& s) {
    std::printf("epoch %d\ttrain_loss=%.6f\tval_loss=%.6f\tval_f1=%.6f\n", s.epoch,
                s.train_loss, s.val_loss, s.val_f1);
    std::fflush(stdout);
  });
  const std::string history_path = a.history.empty() ? a.model_out + ".history.tsv" : a.history;
  WriteFileAtomic(history_path, HistoryToTsv(r.history));
  if (r.diverged) {
    std::fprintf(stderr, "training diverged: %s\n", r.message.c_str());
    if (r.best_epoch >= 0) WriteCheckpoint(r.model, a.model_out);
    return kExitNumeric;
  }
  WriteCheckpoint(r.model, a.model_out);
  std::printf("best epoch %d\tval_f1=%.6f\n", r.best_epoch, r.best_val_f1);
  return 0;
}

// ---- predict

struct PredictArgs {
  std::string model, input, out_dir, vocabulary;
  PostprocessConfig post;
  bool emit_probs = false;
};

int RunPredict(const PredictArgs& a) {
  const Model model = ReadCheckpoint(a.model);
  if (!a.vocabulary.empty()) {
    const Vocabulary requested = ReadVocabulary(a.vocabulary);
    if (!(requested == model.vocab)) {
      Fail(ErrorKind::kModel, "requested vocabulary does not match the model's");
    }
  }
  fs::create_directories(a.out_dir);
  for (const auto& in : ExpandInputs(a.input, ".wav")) {
    const FeatureMatrix feats = LogMel(ReadWav(in), model.features);
    const SoftTargetMatrix probs = model.Predict(feats);
    const EventList events = ProbsToEvents(probs, model.vocab, feats.hop_len_s, a.post);
    const std::string stem = in.stem().string();
    WriteEventList(events, fs::path(a.out_dir) / (stem + ".tsv"));
    if (a.emit_probs) {
      // Stored frame-major like any SEDF: T rows of C class probabilities.
      FeatureMatrix out;
      out.hop_len_s = feats.hop_len_s;
      out.window_len_s = feats.window_len_s;
      out.values = Matrix(probs.cols, probs.rows);
      for (size_t c = 0; c < probs.rows; ++c) {
        for (size_t t = 0; t < probs.cols; ++t) out.values(t, c) = probs(c, t);
      }
      WriteSedf(out, fs::path(a.out_dir) / (stem + ".probs.sedf"));
    }
  }
  return 0;
}

// ---- evaluate

struct EvaluateArgs {
  std::string ref, est, mode = "segment", report, vocabulary;
  double segment_len = 1.0, collar = 0.2;
  bool offset_condition = false;
};

int RunEvaluate(const EvaluateArgs& a) {
  EvalParams p;
  p.mode = a.mode == "event" ? EvalMode::kEvent : EvalMode::kSegment;
  p.segment_len_s = a.segment_len;
  p.collar_s = a.collar;
  p.offset_condition = a.offset_condition;
  if (!a.vocabulary.empty()) p.vocab = ReadVocabulary(a.vocabulary);
  const MetricsReport report = EvaluateDirectory(a.ref, a.est, p);
  std::fputs(ReportToText(report).c_str(), stdout);
  if (!a.report.empty()) WriteFileAtomic(a.report, ReportToTsv(report));
  return 0;
}

// ---- augment

struct AugmentArgs {
  std::string input, out_dir, ops;
  uint64_t seed = 0;
};

struct AugOp {
  std::string name;
  double value = 0.0;
};

std::vector<AugOp> ParseOps(const std::string& spec) {
  std::vector<AugOp> ops;
  size_t start = 0;
  while (start <= spec.size()) {
    size_t end = spec.find(',', start);
    if (end == std::string::npos) end = spec.size();
    const std::string tok = spec.substr(start, end - start);
    start = end + 1;
    if (tok.empty()) Fail(ErrorKind::kConfig, "--ops: empty operation");
    AugOp op;
    const size_t colon = tok.find(':');
    op.name = tok.substr(0, colon);
    if (op.name == "blockmix") {
      if (colon != std::string::npos) Fail(ErrorKind::kConfig, "--ops: blockmix takes no value");
    } else if (op.name == "stretch" || op.name == "noise") {
      if (colon == std::string::npos) {
        Fail(ErrorKind::kConfig, "--ops: " + op.name + " needs a value");
      }
      const std::string v = tok.substr(colon + 1);
      size_t used = 0;
      try {
        op.value = std::stod(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != v.size() || v.empty()) {
        Fail(ErrorKind::kConfig, "--ops: bad value '" + v + "' for " + op.name);
      }
    } else {
      Fail(ErrorKind::kConfig, "--ops: unknown operation '" + op.name + "'");
    }
    ops.push_back(op);
  }
  return ops;
}

int RunAugment(const AugmentArgs& a) {
  const std::vector<AugOp> ops = ParseOps(a.ops);
  const fs::path in_dir = a.input, out_dir = a.out_dir;
  const std::vector<fs::path> wavs = ListFiles(in_dir / "audio", ".wav");

  struct Item {
    std::string id;
    AudioClip audio;
    EventList events;
  };
  std::vector<Item> originals;
  for (const auto& w : wavs) {
    Item it{w.stem().string(), ReadWav(w), {}};
    it.events = ReadEventList(in_dir / "meta" / (it.id + ".tsv"));
    originals.push_back(std::move(it));
  }

  fs::create_directories(out_dir);
  for (const char* name : {"vocabulary.txt", "manifest.tsv"}) {
    if (fs::exists(in_dir / name)) WriteFileAtomic(out_dir / name, ReadFileBytes(in_dir / name));
  }

  for (size_t i = 0; i < originals.size(); ++i) {
    std::mt19937_64 rng(MixSeed(a.seed, i));
    AudioClip audio = originals[i].audio;
    EventList events = originals[i].events;
    for (const auto& op : ops) {
      if (op.name == "stretch") {
        std::tie(audio, events) = TimeStretch(audio, events, op.value);
      } else if (op.name == "noise") {
        AudioClip noise;
        noise.sample_rate = audio.sample_rate;
        noise.samples.resize(audio.samples.size());
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto& s : noise.samples) s = gauss(rng);
        audio = AddNoiseAtSnr(audio, noise, op.value);
      } else {
        // Partner: another original of identical length and rate.
        std::vector<size_t> partners;
        for (size_t j = 0; j < originals.size(); ++j) {
          if (j != i && originals[j].audio.samples.size() == audio.samples.size() &&
              originals[j].audio.sample_rate == audio.sample_rate) {
            partners.push_back(j);
          }
        }
        if (partners.empty()) {
          Fail(ErrorKind::kDimension, originals[i].id + ": no equal-length partner for blockmix");
        }
        std::uniform_int_distribution<size_t> pick(0, partners.size() - 1);
        const Item& other = originals[partners[pick(rng)]];
        EventRoll empty_roll(Vocabulary(), 1.0, 0);
        audio = BlockMix(audio, empty_roll, other.audio, empty_roll).first;
        events = UnionEvents(events, other.events);
      }
    }
    WriteScene(out_dir, originals[i].id, audio, events);
  }
  std::printf("augmented %zu scenes into %s\n", originals.size(), a.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sedtool: polyphonic sound event detection toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* sc = app.add_subcommand("synth", "Synthesize a strongly labeled dataset");
  sc->add_option("--config", synth.config, "Generation config (JSON)")->required();
  sc->add_option("--out-dir", synth.out_dir, "Output dataset directory")->required();
  sc->add_option("--num-scenes", synth.num_scenes, "Number of scenes")->required();
  sc->add_option("--seed", synth.seed, "Random seed");

  FeaturesArgs feats;
  auto* fc = app.add_subcommand("features", "Compute log-mel features (SEDF)");
  fc->add_option("--input", feats.input, "WAV file or directory")->required();
  fc->add_option("--output", feats.output, "SEDF file or directory")->required();
  fc->add_option("--config", feats.config, "Feature config (JSON)");

  TrainArgs train;
  auto* tc = app.add_subcommand("train", "Train a CRNN on a synthesized dataset");
  tc->add_option("--data", train.data, "Dataset directory")->required();
  tc->add_option("--model-out", train.model_out, "Checkpoint path (SEDM)")->required();
  tc->add_option("--config", train.config, "Training config (JSON)");
  tc->add_option("--seed", train.seed, "Random seed");
  tc->add_option("--resume", train.resume, "Continue from a checkpoint");
  tc->add_option("--history", train.history, "History TSV path");

  PredictArgs pred;
  auto* pc = app.add_subcommand("predict", "Detect events in WAV files");
  pc->add_option("--model", pred.model, "Checkpoint (SEDM)")->required();
  pc->add_option("--input", pred.input, "WAV file or directory")->required();
  pc->add_option("--out-dir", pred.out_dir, "Directory for annotation TSVs")->required();
  pc->add_option("--threshold", pred.post.threshold, "Activity threshold");
  pc->add_option("--min-dur", pred.post.min_dur_s, "Minimum event duration (s)");
  pc->add_option("--max-gap", pred.post.max_gap_s, "Largest gap to fill (s)");
  pc->add_flag("--emit-probs", pred.emit_probs, "Also write frame probabilities (SEDF)");
  pc->add_option("--vocabulary", pred.vocabulary, "Expected class list");

  EvaluateArgs ev;
  auto* ec = app.add_subcommand("evaluate", "Score system output against references");
  ec->add_option("--ref", ev.ref, "Reference TSV directory")->required();
  ec->add_option("--est", ev.est, "System TSV directory")->required();
  ec->add_option("--mode", ev.mode, "segment or event")
      ->check(CLI::IsMember({"segment", "event"}));
  ec->add_option("--segment-length", ev.segment_len, "Segment length (s)");
  ec->add_option("--collar", ev.collar, "Onset/offset collar (s)");
  ec->add_flag("--offset-condition", ev.offset_condition, "Require offsets within the collar");
  ec->add_option("--report", ev.report, "Write the TSV report here");
  ec->add_option("--vocabulary", ev.vocabulary, "Class list (default: labels seen)");

  AugmentArgs aug;
  auto* ac = app.add_subcommand("augment", "Augment a dataset directory");
  ac->add_option("--input", aug.input, "Dataset directory")->required();
  ac->add_option("--out-dir", aug.out_dir, "Output dataset directory")->required();
  ac->add_option("--ops", aug.ops, "e.g. stretch:1.1,blockmix,noise:20")->required();
  ac->add_option("--seed", aug.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (sc->parsed()) return RunSynth(synth);
    if (fc->parsed()) return RunFeatures(feats);
    if (tc->parsed()) return RunTrain(train);
    if (pc->parsed()) return RunPredict(pred);
    if (ec->parsed()) return RunEvaluate(ev);
    if (ac->parsed()) return RunAugment(aug);
  } catch (const Error& e) {
    std::fprintf(stderr, "sedtool: %s error: %s\n", ErrorKindName(e.kind()), e.what());
    return ExitCodeFor(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "sedtool: io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sedtool: error: %s\n", e.what());
    return kExitIo;
  }
  return kExitUsage;
}

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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sed/annotations.h"

namespace sed {

struct ClassCounts {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  bool operator==(const ClassCounts&) const = default;
};

// Overall and per-class detection counts. In segment mode S, D and I pair
// false positives with false negatives inside each segment; in event mode
// S = 0, D = FN and I = FP.
struct SegmentCounts {
  std::vector<ClassCounts> per_class;
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long substitutions = 0, deletions = 0, insertions = 0;
  long n_ref = 0;

  void Accumulate(const SegmentCounts& other);
  bool operator==(const SegmentCounts&) const = default;
};

SegmentCounts SegmentBasedCounts(const EventRoll& ref, const EventRoll& sys);

struct Prf {
  double precision = 0.0, recall = 0.0, f_score = 0.0;
};

// Zero denominators give 0 rather than NaN.
Prf PrecisionRecallF(const SegmentCounts& counts);

// (S + D + I) / N; throws kUndefinedMetric when N is zero.
double ErrorRate(const SegmentCounts& counts);

// One-to-one greedy matching: reference events in onset order each take the
// earliest-onset unmatched system event with the same label whose onset (and
// offset, if use_offset) lies within collar_s.
SegmentCounts EventBasedCounts(const EventList& ref, const EventList& sys,
                               double collar_s, bool use_offset,
                               const Vocabulary& vocab);

// Probability that a random positive outranks a random negative, ties 0.5.
double RocAuc(const std::vector<double>& scores, const std::vector<int>& labels);

// (FPR, TPR) points from sweeping the threshold down through every distinct
// score, starting at (0, 0).
std::vector<std::pair<double, double>> RocCurve(const std::vector<double>& scores,
                                                const std::vector<int>& labels);

enum class EvalMode { kSegment, kEvent };

struct EvalParams {
  EvalMode mode = EvalMode::kSegment;
  double segment_len_s = 1.0;
  double collar_s = 0.2;
  bool offset_condition = false;
  // Defaults to the sorted union of labels seen in either directory.
  std::optional<Vocabulary> vocab;
};

struct MetricsReport {
  EvalMode mode = EvalMode::kSegment;
  std::string params;  // "segment_length=1.000" or "collar=0.200;offset=1"
  SegmentCounts counts;
  double precision = 0.0, recall = 0.0, f_score = 0.0, error_rate = 0.0;
};

MetricsReport MakeReport(const SegmentCounts& counts, const EvalParams& params);

// Scores one reference/system pair. Segment mode grids both lists over the
// span ending at the latest offset in either list.
SegmentCounts ScorePair(const EventList& ref, const EventList& sys,
                        const EvalParams& params, const Vocabulary& vocab);

// Pools counts over all stems (*.tsv) before computing metrics.
MetricsReport EvaluateDirectory(const std::filesystem::path& ref_dir,
                                const std::filesystem::path& est_dir,
                                const EvalParams& params);

// Header row plus one value row, tab separated, fixed field order.
std::string ReportToTsv(const MetricsReport& report);
std::string ReportToText(const MetricsReport& report);

}  // namespace sed

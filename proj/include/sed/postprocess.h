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

#include "sed/annotations.h"
#include "sed/augment.h"

namespace sed {

struct PostprocessConfig {
  double threshold = 0.5;
  double min_dur_s = 0.1;
  double max_gap_s = 0.1;
};

// Active iff prob >= threshold. probs is [C x T]; segments are frames.
EventRoll Binarize(const SoftTargetMatrix& probs, double threshold,
                   const Vocabulary& vocab, double hop_len_s);

// Drops events shorter than min_dur_s (1e-9 s tolerance for grid rounding).
EventList EnforceMinDuration(const EventList& events, double min_dur_s);

// Merges same-class events separated by at most max_gap_s until nothing
// changes. Output is sorted.
EventList FillGaps(const EventList& events, double max_gap_s);

// Binarize, runs to events, fill gaps, then drop short events.
EventList ProbsToEvents(const SoftTargetMatrix& probs, const Vocabulary& vocab,
                        double hop_len_s, const PostprocessConfig& cfg);

enum class TagAggregator { kMax, kMean };

WeakLabelSet TagsFromProbs(const SoftTargetMatrix& probs, const Vocabulary& vocab,
                           double threshold, TagAggregator aggregator);

}  // namespace sed

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

#include "sed/postprocess.h"

#include <algorithm>
#include <map>

#include "sed/error.h"

namespace sed {

namespace {

// Frame-grid times are k * hop products; absorb their rounding.
constexpr double kTimeEps = 1e-9;

void CheckThreshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    Fail(ErrorKind::kDomain, "threshold must be in (0, 1)");
  }
}

void CheckVocab(const SoftTargetMatrix& probs, const Vocabulary& vocab) {
  if (probs.rows != vocab.size()) {
    Fail(ErrorKind::kDimension, "probability rows (" + std::to_string(probs.rows) +
                                    ") differ from vocabulary size (" +
                                    std::to_string(vocab.size()) + ")");
  }
}

}  // namespace

EventRoll Binarize(const SoftTargetMatrix& probs, double threshold,
                   const Vocabulary& vocab, double hop_len_s) {
  CheckThreshold(threshold);
  CheckVocab(probs, vocab);
  EventRoll roll(vocab, hop_len_s, probs.cols);
  for (size_t i = 0; i < probs.data.size(); ++i) {
    roll.activity[i] = probs.data[i] >= threshold ? 1 : 0;
  }
  return roll;
}

EventList EnforceMinDuration(const EventList& events, double min_dur_s) {
  if (min_dur_s < 0.0) Fail(ErrorKind::kDomain, "min duration must be >= 0");
  EventList out;
  for (const auto& e : events) {
    if (e.duration_s() >= min_dur_s - kTimeEps) out.push_back(e);
  }
  return out;
}

EventList FillGaps(const EventList& events, double max_gap_s) {
  if (max_gap_s < 0.0) Fail(ErrorKind::kDomain, "max gap must be >= 0");
  std::map<std::string, EventList> by_label;
  for (const auto& e : events) by_label[e.label].push_back(e);
  EventList out;
  for (auto& [label, evs] : by_label) {
    SortEvents(evs);
    // One sorted sweep reaches the fixpoint: a merged event only grows to
    // the right, so it is compared against every later candidate.
    EventInstance cur = evs.front();
    for (size_t i = 1; i < evs.size(); ++i) {
      if (evs[i].onset_s - cur.offset_s <= max_gap_s + kTimeEps) {
        cur.offset_s = std::max(cur.offset_s, evs[i].offset_s);
      } else {
        out.push_back(cur);
        cur = evs[i];
      }
    }
    out.push_back(cur);
  }
  SortEvents(out);
  return out;
}

EventList ProbsToEvents(const SoftTargetMatrix& probs, const Vocabulary& vocab,
                        double hop_len_s, const PostprocessConfig& cfg) {
  EventRoll roll = Binarize(probs, cfg.threshold, vocab, hop_len_s);
  EventList events = RollToEvents(roll);
  events = FillGaps(events, cfg.max_gap_s);
  return EnforceMinDuration(events, cfg.min_dur_s);
}

WeakLabelSet TagsFromProbs(const SoftTargetMatrix& probs, const Vocabulary& vocab,
                           double threshold, TagAggregator aggregator) {
  CheckThreshold(threshold);
  CheckVocab(probs, vocab);
  WeakLabelSet tags;
  if (probs.cols == 0) return tags;
  for (size_t c = 0; c < probs.rows; ++c) {
    const double* row = probs.row(c);
    double agg = 0.0;
    if (aggregator == TagAggregator::kMax) {
      agg = *std::max_element(row, row + probs.cols);
    } else {
      for (size_t t = 0; t < probs.cols; ++t) agg += row[t];
      agg /= static_cast<double>(probs.cols);
    }
    if (agg >= threshold) tags.insert(vocab.label(c));
  }
  return tags;
}

}  // namespace sed

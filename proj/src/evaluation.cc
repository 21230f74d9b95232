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

#include "sed/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "sed/error.h"
#include "sed/fileutil.h"

namespace sed {

namespace fs = std::filesystem;

void SegmentCounts::Accumulate(const SegmentCounts& o) {
  if (per_class.empty()) per_class.resize(o.per_class.size());
  if (per_class.size() != o.per_class.size()) {
    Fail(ErrorKind::kComparison, "cannot pool counts over different vocabularies");
  }
  for (size_t c = 0; c < per_class.size(); ++c) {
    per_class[c].tp += o.per_class[c].tp;
    per_class[c].fp += o.per_class[c].fp;
    per_class[c].fn += o.per_class[c].fn;
    per_class[c].tn += o.per_class[c].tn;
  }
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  n_ref += o.n_ref;
}

SegmentCounts SegmentBasedCounts(const EventRoll& ref, const EventRoll& sys) {
  if (!ref.SameShape(sys)) {
    Fail(ErrorKind::kComparison, "reference and system rolls differ in shape, "
                                 "vocabulary or segment length");
  }
  SegmentCounts out;
  out.per_class.resize(ref.num_classes());
  for (size_t k = 0; k < ref.num_segments; ++k) {
    long fp_k = 0, fn_k = 0;
    for (size_t c = 0; c < ref.num_classes(); ++c) {
      const bool r = ref.at(c, k), s = sys.at(c, k);
      auto& cc = out.per_class[c];
      if (r && s) {
        ++cc.tp;
      } else if (s) {
        ++cc.fp;
        ++fp_k;
      } else if (r) {
        ++cc.fn;
        ++fn_k;
      } else {
        ++cc.tn;
      }
    }
    const long s_k = std::min(fp_k, fn_k);
    out.substitutions += s_k;
    out.deletions += fn_k - s_k;
    out.insertions += fp_k - s_k;
  }
  for (const auto& cc : out.per_class) {
    out.tp += cc.tp;
    out.fp += cc.fp;
    out.fn += cc.fn;
    out.tn += cc.tn;
  }
  out.n_ref = out.tp + out.fn;
  return out;
}

Prf PrecisionRecallF(const SegmentCounts& c) {
  Prf m;
  if (c.tp + c.fp > 0) m.precision = double(c.tp) / double(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = double(c.tp) / double(c.tp + c.fn);
  if (m.precision + m.recall > 0.0) {
    m.f_score = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

double ErrorRate(const SegmentCounts& c) {
  if (c.n_ref <= 0) {
    Fail(ErrorKind::kUndefinedMetric, "error rate needs at least one reference "
                                      "positive");
  }
  return double(c.substitutions + c.deletions + c.insertions) / double(c.n_ref);
}

// Deviations equal to the collar count as inside it despite decimal rounding.
constexpr double kCollarEps = 1e-9;

SegmentCounts EventBasedCounts(const EventList& ref, const EventList& sys,
                               double collar_s, bool use_offset,
                               const Vocabulary& vocab) {
  if (!(collar_s > 0.0)) Fail(ErrorKind::kDomain, "collar must be > 0");
  SegmentCounts out;
  out.per_class.resize(vocab.size());

  std::vector<size_t> ref_order(ref.size()), sys_order(sys.size());
  std::iota(ref_order.begin(), ref_order.end(), 0);
  std::iota(sys_order.begin(), sys_order.end(), 0);
  auto by_onset = [](const EventList& l) {
    return [&l](size_t a, size_t b) {
      return l[a].onset_s < l[b].onset_s ||
             (l[a].onset_s == l[b].onset_s && a < b);
    };
  };
  std::sort(ref_order.begin(), ref_order.end(), by_onset(ref));
  std::sort(sys_order.begin(), sys_order.end(), by_onset(sys));

  std::vector<bool> sys_used(sys.size(), false);
  for (size_t ri : ref_order) {
    const auto& r = ref[ri];
    const size_t c = vocab.IndexOf(r.label);
    bool matched = false;
    for (size_t si : sys_order) {
      if (sys_used[si]) continue;
      const auto& s = sys[si];
      if (s.label != r.label) continue;
      if (std::abs(s.onset_s - r.onset_s) > collar_s + kCollarEps) continue;
      if (use_offset && std::abs(s.offset_s - r.offset_s) > collar_s + kCollarEps) continue;
      sys_used[si] = true;
      matched = true;
      break;
    }
    if (matched) {
      ++out.per_class[c].tp;
    } else {
      ++out.per_class[c].fn;
    }
  }
  for (size_t si = 0; si < sys.size(); ++si) {
    const size_t c = vocab.IndexOf(sys[si].label);
    if (!sys_used[si]) ++out.per_class[c].fp;
  }
  for (const auto& cc : out.per_class) {
    out.tp += cc.tp;
    out.fp += cc.fp;
    out.fn += cc.fn;
  }
  out.n_ref = out.tp + out.fn;
  out.deletions = out.fn;
  out.insertions = out.fp;
  return out;
}

namespace {

void CheckBinaryLabels(const std::vector<double>& scores,
                       const std::vector<int>& labels, long& pos, long& neg) {
  if (scores.size() != labels.size()) {
    Fail(ErrorKind::kDimension, "scores and labels differ in length");
  }
  pos = neg = 0;
  for (int l : labels) {
    if (l == 1) {
      ++pos;
    } else if (l == 0) {
      ++neg;
    } else {
      Fail(ErrorKind::kDomain, "labels must be 0 or 1");
    }
  }
  if (pos == 0 || neg == 0) {
    Fail(ErrorKind::kUndefinedMetric, "AUC needs both positive and negative items");
  }
}

}  // namespace

double RocAuc(const std::vector<double>& scores, const std::vector<int>& labels) {
  long pos = 0, neg = 0;
  CheckBinaryLabels(scores, labels, pos, neg);
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Sum of (doubled) mid-ranks of positives keeps everything integral.
  long long rank2_sum = 0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const long long mid2 = static_cast<long long>(i + 1 + j);  // 2 * mid-rank
    for (size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank2_sum += mid2;
    }
    i = j;
  }
  const long long u2 = rank2_sum - static_cast<long long>(pos) * (pos + 1);
  return static_cast<double>(u2) / (2.0 * double(pos) * double(neg));
}

std::vector<std::pair<double, double>> RocCurve(const std::vector<double>& scores,
                                                const std::vector<int>& labels) {
  long pos = 0, neg = 0;
  CheckBinaryLabels(scores, labels, pos, neg);
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  std::vector<std::pair<double, double>> pts = {{0.0, 0.0}};
  long tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
      ++j;
    }
    pts.emplace_back(double(fp) / double(neg), double(tp) / double(pos));
    i = j;
  }
  return pts;
}

namespace {

std::string ParamString(const EvalParams& p) {
  char buf[96];
  if (p.mode == EvalMode::kSegment) {
    std::snprintf(buf, sizeof(buf), "segment_length=%.3f", p.segment_len_s);
  } else {
    std::snprintf(buf, sizeof(buf), "collar=%.3f;offset=%d", p.collar_s,
                  p.offset_condition ? 1 : 0);
  }
  return buf;
}

}  // namespace

MetricsReport MakeReport(const SegmentCounts& counts, const EvalParams& params) {
  MetricsReport r;
  r.mode = params.mode;
  r.params = ParamString(params);
  r.counts = counts;
  const Prf m = PrecisionRecallF(counts);
  r.precision = m.precision;
  r.recall = m.recall;
  r.f_score = m.f_score;
  r.error_rate = ErrorRate(counts);
  return r;
}

SegmentCounts ScorePair(const EventList& ref, const EventList& sys,
                        const EvalParams& params, const Vocabulary& vocab) {
  if (params.mode == EvalMode::kEvent) {
    return EventBasedCounts(ref, sys, params.collar_s, params.offset_condition, vocab);
  }
  double duration = 0.0;
  for (const auto* l : {&ref, &sys}) {
    for (const auto& e : *l) duration = std::max(duration, e.offset_s);
  }
  return SegmentBasedCounts(EventsToRoll(ref, duration, params.segment_len_s, vocab),
                            EventsToRoll(sys, duration, params.segment_len_s, vocab));
}

MetricsReport EvaluateDirectory(const fs::path& ref_dir, const fs::path& est_dir,
                                const EvalParams& params) {
  const auto ref_files = ListFiles(ref_dir, ".tsv");
  const auto est_files = ListFiles(est_dir, ".tsv");
  std::set<std::string> ref_stems, est_stems;
  for (const auto& f : ref_files) ref_stems.insert(f.stem().string());
  for (const auto& f : est_files) est_stems.insert(f.stem().string());
  std::string missing;
  for (const auto& s : ref_stems) {
    if (!est_stems.count(s)) missing += " " + s + " (no estimate)";
  }
  for (const auto& s : est_stems) {
    if (!ref_stems.count(s)) missing += " " + s + " (no reference)";
  }
  if (!missing.empty()) Fail(ErrorKind::kComparison, "unmatched stems:" + missing);
  if (ref_stems.empty()) {
    Fail(ErrorKind::kUndefinedMetric, "no annotation files to evaluate");
  }

  std::vector<std::pair<EventList, EventList>> pairs;
  std::set<std::string> labels;
  for (const auto& stem : ref_stems) {
    auto ref = ReadEventList(ref_dir / (stem + ".tsv"));
    auto est = ReadEventList(est_dir / (stem + ".tsv"));
    for (const auto& e : ref) labels.insert(e.label);
    for (const auto& e : est) labels.insert(e.label);
    pairs.emplace_back(std::move(ref), std::move(est));
  }
  const Vocabulary vocab =
      params.vocab ? *params.vocab
                   : Vocabulary(std::vector<std::string>(labels.begin(), labels.end()));

  SegmentCounts total;
  total.per_class.resize(vocab.size());
  for (const auto& [ref, est] : pairs) total.Accumulate(ScorePair(ref, est, params, vocab));
  return MakeReport(total, params);
}

std::string ReportToTsv(const MetricsReport& r) {
  const auto& c = r.counts;
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "mode\tparams\tTP\tFP\tFN\tTN\tS\tD\tI\tN\tprecision\trecall\t"
                "f_score\terror_rate\n"
                "%s\t%s\t%ld\t%ld\t%ld\t%ld\t%ld\t%ld\t%ld\t%ld\t%.6f\t%.6f\t%.6f\t%.6f\n",
                r.mode == EvalMode::kSegment ? "segment" : "event", r.params.c_str(),
                c.tp, c.fp, c.fn, c.tn, c.substitutions, c.deletions, c.insertions,
                c.n_ref, r.precision, r.recall, r.f_score, r.error_rate);
  return buf;
}

std::string ReportToText(const MetricsReport& r) {
  const auto& c = r.counts;
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "mode:       %s\nparams:     %s\n"
                "TP: %ld  FP: %ld  FN: %ld  TN: %ld\n"
                "S: %ld  D: %ld  I: %ld  N: %ld\n"
                "precision:  %.4f\nrecall:     %.4f\nf_score:    %.4f\n"
                "error_rate: %.4f\n",
                r.mode == EvalMode::kSegment ? "segment" : "event", r.params.c_str(),
                c.tp, c.fp, c.fn, c.tn, c.substitutions, c.deletions, c.insertions,
                c.n_ref, r.precision, r.recall, r.f_score, r.error_rate);
  return buf;
}

}  // namespace sed

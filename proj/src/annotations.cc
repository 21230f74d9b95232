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

#include "sed/annotations.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "sed/error.h"
#include "sed/fileutil.h"

namespace sed {

namespace {

// Overlaps shorter than this fraction of a segment count as zero; absorbs
// rounding in k*L products so grid-aligned events stay grid-aligned.
constexpr double kGridEps = 1e-9;

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

bool ParseDouble(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> classes)
    : classes_(std::move(classes)) {
  std::set<std::string> seen;
  for (const auto& c : classes_) {
    if (c.empty()) Fail(ErrorKind::kVocabulary, "empty class label");
    if (!seen.insert(c).second) {
      Fail(ErrorKind::kVocabulary, "duplicate class label '" + c + "'");
    }
  }
}

size_t Vocabulary::IndexOf(std::string_view label) const {
  auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) {
    Fail(ErrorKind::kVocabulary,
         "label '" + std::string(label) + "' not in vocabulary");
  }
  return static_cast<size_t>(it - classes_.begin());
}

bool Vocabulary::Contains(std::string_view label) const {
  return std::find(classes_.begin(), classes_.end(), label) != classes_.end();
}

Vocabulary ParseVocabulary(std::string_view text) {
  std::vector<std::string> classes;
  for (auto line : SplitLines(text)) {
    if (!line.empty()) classes.emplace_back(line);
  }
  return Vocabulary(std::move(classes));
}

std::string SerializeVocabulary(const Vocabulary& vocab) {
  std::string out;
  for (const auto& c : vocab.classes()) out += c + "\n";
  return out;
}

Vocabulary ReadVocabulary(const std::filesystem::path& path) {
  return ParseVocabulary(ReadFileBytes(path));
}

void ValidateEvent(const EventInstance& e) {
  if (!(e.onset_s >= 0.0) || !(e.onset_s < e.offset_s) ||
      !std::isfinite(e.offset_s)) {
    Fail(ErrorKind::kConfig, "event needs 0 <= onset < offset");
  }
  if (e.label.empty()) Fail(ErrorKind::kConfig, "event label is empty");
}

void SortEvents(EventList& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const EventInstance& a, const EventInstance& b) {
                     return std::tie(a.onset_s, a.label, a.offset_s) <
                            std::tie(b.onset_s, b.label, b.offset_s);
                   });
}

EventList ParseEventList(std::string_view text) {
  EventList events;
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    std::vector<std::string_view> cols;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 3) {
      Fail(ErrorKind::kParse, where + ": expected 3 tab-separated columns, got " +
                                  std::to_string(cols.size()));
    }
    EventInstance e;
    if (!ParseDouble(cols[0], e.onset_s) || !ParseDouble(cols[1], e.offset_s)) {
      Fail(ErrorKind::kParse, where + ": non-numeric time field");
    }
    e.label = std::string(cols[2]);
    if (e.label.empty()) Fail(ErrorKind::kParse, where + ": empty label");
    if (e.onset_s < 0.0) Fail(ErrorKind::kParse, where + ": negative onset");
    if (!(e.offset_s > e.onset_s)) {
      Fail(ErrorKind::kParse, where + ": offset must be after onset");
    }
    events.push_back(std::move(e));
  }
  SortEvents(events);
  return events;
}

std::string SerializeEventList(const EventList& events) {
  std::string out;
  char buf[64];
  for (const auto& e : events) {
    std::snprintf(buf, sizeof(buf), "%.3f\t%.3f\t", e.onset_s, e.offset_s);
    out += buf;
    out += e.label;
    out += '\n';
  }
  return out;
}

EventList ReadEventList(const std::filesystem::path& path) {
  try {
    return ParseEventList(ReadFileBytes(path));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kParse) throw;
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

void WriteEventList(const EventList& events,
                    const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeEventList(events));
}

EventRoll::EventRoll(Vocabulary v, double segment_len, size_t segments)
    : vocab(std::move(v)),
      segment_len_s(segment_len),
      num_segments(segments),
      activity(vocab.size() * segments, 0) {
  if (!(segment_len > 0.0)) Fail(ErrorKind::kConfig, "segment length must be > 0");
}

bool EventRoll::SameShape(const EventRoll& other) const {
  return vocab == other.vocab && num_segments == other.num_segments &&
         segment_len_s == other.segment_len_s;
}

size_t SegmentCount(double duration_s, double segment_len_s) {
  if (duration_s <= 0.0) return 0;
  return static_cast<size_t>(std::ceil(duration_s / segment_len_s - kGridEps));
}

EventRoll EventsToRollClipped(const EventList& events, size_t num_segments,
                              double segment_len_s, const Vocabulary& vocab) {
  EventRoll roll(vocab, segment_len_s, num_segments);
  for (const auto& e : events) {
    const size_t c = vocab.IndexOf(e.label);
    const double first = std::floor(e.onset_s / segment_len_s + kGridEps);
    const double last = std::ceil(e.offset_s / segment_len_s - kGridEps) - 1.0;
    if (last < first || last < 0.0) continue;
    const size_t k0 = static_cast<size_t>(std::max(first, 0.0));
    const size_t k1 = std::min(static_cast<size_t>(last) + 1, num_segments);
    for (size_t k = k0; k < k1; ++k) roll.at(c, k) = 1;
  }
  return roll;
}

EventRoll EventsToRoll(const EventList& events, double duration_s,
                       double segment_len_s, const Vocabulary& vocab) {
  if (!(segment_len_s > 0.0)) Fail(ErrorKind::kConfig, "segment length must be > 0");
  for (const auto& e : events) {
    if (e.offset_s > duration_s + kGridEps * segment_len_s) {
      Fail(ErrorKind::kDomain, "event offset " + std::to_string(e.offset_s) +
                                   " exceeds duration " +
                                   std::to_string(duration_s));
    }
  }
  return EventsToRollClipped(events, SegmentCount(duration_s, segment_len_s),
                             segment_len_s, vocab);
}

EventList RollToEvents(const EventRoll& roll) {
  EventList events;
  const double len = roll.segment_len_s;
  for (size_t c = 0; c < roll.num_classes(); ++c) {
    size_t k = 0;
    while (k < roll.num_segments) {
      if (!roll.at(c, k)) {
        ++k;
        continue;
      }
      size_t end = k;
      while (end < roll.num_segments && roll.at(c, end)) ++end;
      events.push_back({static_cast<double>(k) * len,
                        static_cast<double>(end) * len, roll.vocab.label(c)});
      k = end;
    }
  }
  SortEvents(events);
  return events;
}

WeakLabelSet WeakFromStrong(const EventList& events) {
  WeakLabelSet tags;
  for (const auto& e : events) tags.insert(e.label);
  return tags;
}

}  // namespace sed

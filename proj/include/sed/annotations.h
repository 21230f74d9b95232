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

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sed {

// Closed, ordered class list; position defines the class index.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> classes);

  size_t size() const { return classes_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::string& label(size_t index) const { return classes_[index]; }
  // Throws kVocabulary for unknown labels.
  size_t IndexOf(std::string_view label) const;
  bool Contains(std::string_view label) const;

  bool operator==(const Vocabulary&) const = default;

 private:
  std::vector<std::string> classes_;
};

Vocabulary ParseVocabulary(std::string_view text);
std::string SerializeVocabulary(const Vocabulary& vocab);
Vocabulary ReadVocabulary(const std::filesystem::path& path);

struct EventInstance {
  double onset_s = 0.0;
  double offset_s = 0.0;
  std::string label;

  double duration_s() const { return offset_s - onset_s; }
  bool operator==(const EventInstance&) const = default;
};

using EventList = std::vector<EventInstance>;
using WeakLabelSet = std::set<std::string>;

// Throws kConfig unless 0 <= onset < offset and the label is non-empty.
void ValidateEvent(const EventInstance& event);
// Sorts by (onset, label, offset).
void SortEvents(EventList& events);

// TSV lines "onset<TAB>offset<TAB>label"; blank lines are skipped.
EventList ParseEventList(std::string_view text);
std::string SerializeEventList(const EventList& events);
EventList ReadEventList(const std::filesystem::path& path);
void WriteEventList(const EventList& events, const std::filesystem::path& path);

// Classes x segments activity over half-open segments [kL, (k+1)L).
struct EventRoll {
  Vocabulary vocab;
  double segment_len_s = 1.0;
  size_t num_segments = 0;
  std::vector<uint8_t> activity;  // class-major

  EventRoll() = default;
  EventRoll(Vocabulary v, double segment_len, size_t segments);

  size_t num_classes() const { return vocab.size(); }
  uint8_t& at(size_t c, size_t k) { return activity[c * num_segments + k]; }
  uint8_t at(size_t c, size_t k) const {
    return activity[c * num_segments + k];
  }
  bool SameShape(const EventRoll& other) const;
  bool operator==(const EventRoll&) const = default;
};

// Number of segments covering `duration_s`: ceil(duration / L).
size_t SegmentCount(double duration_s, double segment_len_s);

// A segment is active iff an event of that class overlaps it by a positive
// amount. Requires duration_s >= every offset.
EventRoll EventsToRoll(const EventList& events, double duration_s,
                       double segment_len_s, const Vocabulary& vocab);
// Fixed segment count; events extending past the grid are clipped.
EventRoll EventsToRollClipped(const EventList& events, size_t num_segments,
                              double segment_len_s, const Vocabulary& vocab);

// Each maximal run of active segments becomes one event.
EventList RollToEvents(const EventRoll& roll);

WeakLabelSet WeakFromStrong(const EventList& events);

}  // namespace sed

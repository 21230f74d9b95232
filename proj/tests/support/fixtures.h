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

// Hand-scored event-matching cases at a 0.2 s collar. Each case lives in its
// own time window so the cases can also be scored all at once.

#include <string>
#include <vector>

#include "sed/annotations.h"

namespace sedtest {

struct Tally {
  long tp = 0, fp = 0, fn = 0;
};

struct CollarCase {
  std::string name;
  sed::EventList ref, sys;
  Tally with_offset, onset_only;
};

inline const sed::Vocabulary& CollarVocab() {
  static const sed::Vocabulary v({"bird", "car", "dog"});
  return v;
}

inline std::vector<CollarCase> CollarCases() {
  return {
      {"both_in", {{1.00, 2.00, "car"}}, {{1.15, 2.10, "car"}}, {1, 0, 0}, {1, 0, 0}},
      {"onset_in_offset_out", {{3.00, 4.00, "car"}}, {{3.10, 4.50, "car"}}, {0, 1, 1}, {1, 0, 0}},
      {"onset_out", {{5.00, 6.00, "dog"}}, {{5.25, 6.00, "dog"}}, {0, 1, 1}, {0, 1, 1}},
      {"label_mismatch", {{7.00, 8.00, "dog"}}, {{7.00, 8.00, "bird"}}, {0, 1, 1}, {0, 1, 1}},
      {"extra_system_event", {}, {{9.00, 9.50, "bird"}}, {0, 1, 0}, {0, 1, 0}},
      {"missed_reference", {{10.00, 11.00, "car"}}, {}, {0, 0, 1}, {0, 0, 1}},
      // Greedy choice: the earliest-onset candidate wins unless the offset
      // condition rules it out.
      {"two_candidates",
       {{12.00, 13.00, "car"}},
       {{12.05, 13.60, "car"}, {12.10, 13.05, "car"}},
       {1, 1, 0},
       {1, 1, 0}},
      {"deviation_equal_to_collar", {{14.00, 15.00, "dog"}}, {{14.20, 15.20, "dog"}}, {1, 0, 0},
       {1, 0, 0}},
  };
}

}  // namespace sedtest

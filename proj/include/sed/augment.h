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

#include <random>
#include <utility>

#include "sed/annotations.h"
#include "sed/audio_io.h"
#include "sed/features.h"
#include "sed/matrix.h"

namespace sed {

// Real-valued targets, classes x frames, each in [0, 1].
using SoftTargetMatrix = Matrix;

SoftTargetMatrix RollToSoftTargets(const EventRoll& roll);

// Resamples by linear interpolation so the output lasts `factor` times as
// long; every event endpoint is multiplied by `factor`. Pitch shifts too.
std::pair<AudioClip, EventList> TimeStretch(const AudioClip& clip,
                                            const EventList& events,
                                            double factor);

// 0.5 * (a + b) with the union of both rolls.
std::pair<AudioClip, EventRoll> BlockMix(const AudioClip& clip_a,
                                         const EventRoll& roll_a,
                                         const AudioClip& clip_b,
                                         const EventRoll& roll_b);

// Event-level counterpart of the roll union: concatenation, with
// overlapping or touching same-class events merged.
EventList UnionEvents(const EventList& a, const EventList& b);

// Convex combination of features and targets.
std::pair<FeatureMatrix, SoftTargetMatrix> Mixup(const FeatureMatrix& x_a,
                                                 const SoftTargetMatrix& y_a,
                                                 const FeatureMatrix& x_b,
                                                 const SoftTargetMatrix& y_b,
                                                 double lambda);

// clip + g * noise[0:len(clip)] with g chosen so the mean-square ratio is
// snr_db. +infinity returns the clip unchanged.
AudioClip AddNoiseAtSnr(const AudioClip& clip, const AudioClip& noise,
                        double snr_db);

double MeanSquare(const double* samples, size_t n);

// Beta(alpha, beta) draw via two gamma variates.
double SampleBeta(double alpha, double beta, std::mt19937_64& rng);

}  // namespace sed

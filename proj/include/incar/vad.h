// vad.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_VAD_H_
#define INCAR_VAD_H_

#include <vector>

#include "incar/core.h"
#include "incar/rttm.h"

namespace incar {

struct VadConfig {
  double frame = 0.01;               // seconds, non-overlapping
  double energy_threshold_db = 10.0;  // above the running noise floor
  int hangover = 1;                  // frames kept after a speech run
  double min_speech = 0.1;           // seconds; shorter raw runs are dropped
  double min_silence = 0.1;          // seconds; shorter gaps are bridged
  double floor_rise_db = 0.05;       // per frame
  double floor_percentile = 0.1;     // initial floor from the energy quantile

  void Validate() const;
};

// Frame energy against a running noise floor that drops instantly and
// rises slowly. Raw speech runs shorter than min_speech are discarded,
// then hangover extends each run and gaps shorter than min_silence are
// bridged. Regions are sorted and disjoint, in seconds from the start.
std::vector<Interval> EnergyVad(const AudioBuffer &audio, const VadConfig &config = {});

}  // namespace incar

#endif  // INCAR_VAD_H_

// vad.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/vad.h"

#include <algorithm>
#include <cmath>

#include "incar/signal.h"

namespace incar {

void VadConfig::Validate() const {
  if (frame <= 0.0) throw Error("VAD frame must be positive");
  if (hangover < 0) throw Error("VAD hangover must be >= 0");
  if (floor_percentile < 0.0 || floor_percentile > 1.0)
    throw Error("VAD floor percentile must lie in [0, 1]");
}

std::vector<Interval> EnergyVad(const AudioBuffer &audio, const VadConfig &config) {
  config.Validate();
  const int fs = audio.sample_rate();
  const Eigen::Index hop = std::max<Eigen::Index>(1, std::llround(config.frame * fs));
  const Eigen::Index n = audio.num_samples();
  const Eigen::Index frames = (n + hop - 1) / hop;
  if (frames == 0) return {};
  const double frame_sec = static_cast<double>(hop) / fs;

  std::vector<double> energy(frames);
  for (Eigen::Index t = 0; t < frames; ++t) {
    Eigen::Index len = std::min(hop, n - t * hop);
    double p = audio.samples().middleCols(t * hop, len).squaredNorm() /
               static_cast<double>(len * audio.channels());
    energy[t] = 10.0 * std::log10(p + 1e-12);
  }

  std::vector<double> sorted = energy;
  std::sort(sorted.begin(), sorted.end());
  double floor_db = sorted[static_cast<size_t>(
      std::floor(config.floor_percentile * static_cast<double>(frames - 1)))];

  std::vector<char> speech(frames, 0);
  for (Eigen::Index t = 0; t < frames; ++t) {
    floor_db = energy[t] < floor_db
                   ? energy[t]
                   : std::min(energy[t], floor_db + config.floor_rise_db);
    speech[t] = energy[t] > floor_db + config.energy_threshold_db;
  }

  // Runs as [begin, end) frame ranges.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;
  for (Eigen::Index t = 0; t < frames;) {
    if (!speech[t]) { ++t; continue; }
    Eigen::Index e = t;
    while (e < frames && speech[e]) ++e;
    runs.emplace_back(t, e);
    t = e;
  }
  const double eps = 1e-9;
  std::erase_if(runs, [&](const auto &r) {
    return (r.second - r.first) * frame_sec < config.min_speech - eps;
  });
  for (auto &r : runs) r.second = std::min<Eigen::Index>(r.second + config.hangover, frames);

  std::vector<Interval> regions;
  const double total = static_cast<double>(n) / fs;
  for (const auto &r : runs) {
    Interval iv{r.first * frame_sec, std::min(r.second * frame_sec, total)};
    if (!regions.empty() && iv.begin - regions.back().end < config.min_silence - eps)
      regions.back().end = std::max(regions.back().end, iv.end);
    else
      regions.push_back(iv);
  }
  return regions;
}

}  // namespace incar

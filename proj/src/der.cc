// der.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/der.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace incar {

std::vector<int> MaxWeightAssignment(const RealMatrix &weight) {
  const Eigen::Index rows = weight.rows(), cols = weight.cols();
  if (rows == 0) return {};
  if (!weight.allFinite()) throw Error("assignment weights must be finite");
  // Hungarian algorithm (potentials form) on a square cost matrix.
  const Eigen::Index n = std::max(rows, cols);
  RealMatrix cost = RealMatrix::Zero(n, n);
  const double top = cols > 0 ? weight.maxCoeff() : 0.0;
  cost.topLeftCorner(rows, cols) = (top - weight.array()).matrix();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Eigen::Index> p(n + 1, 0), way(n + 1, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = p[j0];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(rows, -1);
  for (Eigen::Index j = 1; j <= n; ++j) {
    const Eigen::Index i = p[j] - 1;
    if (i < rows && j - 1 < cols) out[i] = static_cast<int>(j - 1);
  }
  return out;
}

namespace {

using FrameMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Frames whose centers fall in [begin, end).
std::pair<Eigen::Index, Eigen::Index> FrameRange(double begin, double end,
                                                 double res, Eigen::Index frames) {
  auto first = [&](double t) {
    return static_cast<Eigen::Index>(std::ceil(t / res - 0.5 - 1e-9));
  };
  Eigen::Index lo = std::clamp<Eigen::Index>(first(begin), 0, frames);
  Eigen::Index hi = std::clamp<Eigen::Index>(first(end), 0, frames);
  return {lo, std::max(lo, hi)};
}

FrameMask Rasterize(const RttmSegmentList &segments, const std::string &recording,
                    const std::vector<std::string> &speakers, double res,
                    Eigen::Index frames) {
  FrameMask m = FrameMask::Constant(static_cast<Eigen::Index>(speakers.size()), frames, false);
  for (const auto &s : segments) {
    if (s.recording != recording) continue;
    const Eigen::Index k =
        std::lower_bound(speakers.begin(), speakers.end(), s.speaker) - speakers.begin();
    auto [lo, hi] = FrameRange(s.onset, s.end(), res, frames);
    if (hi > lo) m.row(k).segment(lo, hi - lo).setConstant(true);
  }
  return m;
}

}  // namespace

DerReport ScoreDer(const RttmSegmentList &reference, const RttmSegmentList &hypothesis,
                   const DerConfig &config) {
  if (!(config.resolution > 0.0)) throw Error("DER resolution must be positive");
  if (config.collar < 0.0) throw Error("DER collar must be non-negative");
  const double res = config.resolution;

  std::set<std::string> recordings;
  for (const auto &r : Recordings(reference)) recordings.insert(r);
  for (const auto &r : Recordings(hypothesis)) recordings.insert(r);

  DerReport report;
  double ref_frames = 0, missed = 0, false_alarm = 0, confusion = 0;
  for (const auto &rec : recordings) {
    double end = 0.0;
    for (const auto &s : reference)
      if (s.recording == rec) end = std::max(end, s.end());
    for (const auto &s : hypothesis)
      if (s.recording == rec) end = std::max(end, s.end());
    const Eigen::Index frames = static_cast<Eigen::Index>(std::ceil(end / res)) + 1;

    const auto ref_spk = Speakers(reference, rec);
    const auto hyp_spk = Speakers(hypothesis, rec);
    FrameMask ref = Rasterize(reference, rec, ref_spk, res, frames);
    FrameMask hyp = Rasterize(hypothesis, rec, hyp_spk, res, frames);

    Eigen::Array<bool, Eigen::Dynamic, 1> scored =
        Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(frames, true);
    if (config.collar > 0.0) {
      for (const auto &s : reference) {
        if (s.recording != rec) continue;
        for (double b : {s.onset, s.end()}) {
          auto [lo, hi] = FrameRange(b - config.collar, b + config.collar, res, frames);
          for (Eigen::Index t = lo; t < hi; ++t)
            if (std::abs((t + 0.5) * res - b) < config.collar) scored(t) = false;
        }
      }
    }

    // Overlap counts on scored frames.
    RealMatrix overlap = RealMatrix::Zero(hyp_spk.size(), ref_spk.size());
    for (Eigen::Index t = 0; t < frames; ++t) {
      if (!scored(t)) continue;
      for (size_t h = 0; h < hyp_spk.size(); ++h) {
        if (!hyp(h, t)) continue;
        for (size_t r = 0; r < ref_spk.size(); ++r)
          if (ref(r, t)) overlap(h, r) += 1.0;
      }
    }
    std::vector<int> map = MaxWeightAssignment(overlap);
    auto &names = report.speaker_map[rec];
    for (size_t h = 0; h < map.size(); ++h)
      if (map[h] >= 0) names[hyp_spk[h]] = ref_spk[map[h]];

    for (Eigen::Index t = 0; t < frames; ++t) {
      if (!scored(t)) continue;
      const int nref = static_cast<int>(ref.col(t).count());
      const int nhyp = static_cast<int>(hyp.col(t).count());
      int correct = 0;
      for (size_t h = 0; h < map.size(); ++h)
        if (map[h] >= 0 && hyp(h, t) && ref(map[h], t)) ++correct;
      ref_frames += nref;
      missed += std::max(0, nref - nhyp);
      false_alarm += std::max(0, nhyp - nref);
      confusion += std::min(nref, nhyp) - correct;
    }
  }
  if (ref_frames <= 0.0) throw Error("reference has no scored speech; DER is undefined");

  report.reference_seconds = ref_frames * res;
  report.missed_seconds = missed * res;
  report.false_alarm_seconds = false_alarm * res;
  report.confusion_seconds = confusion * res;
  report.missed_pct = 100.0 * missed / ref_frames;
  report.false_alarm_pct = 100.0 * false_alarm / ref_frames;
  report.confusion_pct = 100.0 * confusion / ref_frames;
  report.der_pct = report.missed_pct + report.false_alarm_pct + report.confusion_pct;
  return report;
}

}  // namespace incar

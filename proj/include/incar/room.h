// room.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_ROOM_H_
#define INCAR_ROOM_H_

#include <string>
#include <vector>

#include "incar/core.h"

namespace incar {

class KeyValueConfig;

// Shoebox with one corner at the origin and uniform wall absorption.
struct RoomSpec {
  Point3 dimensions{2.8, 1.5, 1.2};
  double absorption = 0.6;
  int max_order = 17;
  double speed_of_sound = 343.0;
  int sample_rate = 16000;

  void Validate() const;
  bool Contains(const Point3 &p) const;
};

struct ScenePlacement {
  std::vector<Point3> sources;
  std::vector<Point3> microphones;

  void Validate(const RoomSpec &room) const;
};

// One mirrored source seen from a microphone.
struct ImageContribution {
  double delay_seconds = 0.0;
  double amplitude = 0.0;  // (1 - absorption)^(order / 2) / (4 pi d)
  int order = 0;           // number of wall bounces
};

struct ImpulseResponse {
  RealVector taps;
  int sample_rate = 16000;
};

// Number of taps of the fractional-delay interpolator.
inline constexpr int kFractionalDelayTaps = 81;

// Images with at most room.max_order bounces and nonzero amplitude,
// ordered by delay.
std::vector<ImageContribution> EnumerateImages(const RoomSpec &room,
                                               const Point3 &source,
                                               const Point3 &mic);

// Image-source impulse response. Each image is rendered with an 81-tap
// Hann-windowed sinc at its fractional delay; taps earlier than one
// sample before the direct path are cut so the response is causal.
ImpulseResponse ImageSourceRir(const RoomSpec &room, const Point3 &source,
                               const Point3 &mic);

// Impulse responses for every (source, mic) pair, indexed [source][mic].
std::vector<std::vector<ImpulseResponse>> RirBank(
    const RoomSpec &room, const ScenePlacement &placement);

// output[m] = sum_s dry[s] * rir(s, m); length is the longest dry signal
// plus the longest response minus one.
AudioBuffer SimulateScene(const RoomSpec &room, const ScenePlacement &placement,
                          const std::vector<AudioBuffer> &dry);
AudioBuffer SimulateScene(
    const std::vector<std::vector<ImpulseResponse>> &bank,
    const std::vector<AudioBuffer> &dry);

// Per-source reverberant images at every microphone, same length as
// SimulateScene output; summing them reproduces the scene.
std::vector<AudioBuffer> SourceImages(
    const std::vector<std::vector<ImpulseResponse>> &bank,
    const std::vector<AudioBuffer> &dry);

// 2.8 x 1.5 x 1.2 m cabin, four ceiling microphones on the centerline
// and one head position per seat (front-left, front-right, rear-left,
// rear-right).
struct CabinPreset {
  RoomSpec room;
  std::vector<Point3> microphones;
  std::vector<Point3> seats;
};
CabinPreset DefaultCabin();

// Keys: room.dims, room.absorption, room.max_order, room.speed_of_sound,
// room.sample_rate, source (repeatable "x y z"), mic (repeatable).
// Missing room keys fall back to the cabin preset; with no source/mic
// keys the preset seats and microphones are used.
void RoomFromConfig(const KeyValueConfig &config, RoomSpec *room,
                    ScenePlacement *placement);

}  // namespace incar

#endif  // INCAR_ROOM_H_

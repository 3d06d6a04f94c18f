// room.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/room.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "incar/config.h"
#include "incar/signal.h"

namespace incar {

void RoomSpec::Validate() const {
  if ((dimensions.array() <= 0.0).any())
    throw Error("room dimensions must be positive");
  if (!(absorption > 0.0 && absorption <= 1.0))
    throw Error("absorption must lie in (0, 1]");
  if (max_order < 0) throw Error("max_order must be >= 0");
  if (speed_of_sound <= 0.0) throw Error("speed of sound must be positive");
  if (sample_rate <= 0) throw Error("sample rate must be positive");
}

bool RoomSpec::Contains(const Point3 &p) const {
  return (p.array() > 0.0).all() && (p.array() < dimensions.array()).all();
}

void ScenePlacement::Validate(const RoomSpec &room) const {
  if (sources.empty()) throw Error("scene needs at least one source");
  if (microphones.empty()) throw Error("scene needs at least one microphone");
  for (const auto &s : sources)
    if (!room.Contains(s)) throw Error("source outside room");
  for (const auto &m : microphones)
    if (!room.Contains(m)) throw Error("microphone outside room");
  for (const auto &s : sources)
    for (const auto &m : microphones)
      if ((s - m).norm() == 0.0) throw Error("source coincides with microphone");
}

std::vector<ImageContribution> EnumerateImages(const RoomSpec &room,
                                               const Point3 &source,
                                               const Point3 &mic) {
  room.Validate();
  if (!room.Contains(source)) throw Error("source outside room");
  if (!room.Contains(mic)) throw Error("microphone outside room");
  if ((source - mic).norm() == 0.0)
    throw Error("source coincides with microphone");

  const double beta = std::sqrt(1.0 - room.absorption);
  const int order = room.max_order;
  const int n_max = order / 2 + 1;
  std::vector<ImageContribution> images;
  // Image coordinate along one axis: (1 - 2q) s + 2 n L, reached after
  // |n - q| + |n| bounces.
  for (int qx = 0; qx <= 1; ++qx)
    for (int nx = -n_max; nx <= n_max; ++nx) {
      int rx = std::abs(nx - qx) + std::abs(nx);
      if (rx > order) continue;
      double x = (1 - 2 * qx) * source.x() + 2.0 * nx * room.dimensions.x();
      for (int qy = 0; qy <= 1; ++qy)
        for (int ny = -n_max; ny <= n_max; ++ny) {
          int ry = std::abs(ny - qy) + std::abs(ny);
          if (rx + ry > order) continue;
          double y = (1 - 2 * qy) * source.y() + 2.0 * ny * room.dimensions.y();
          for (int qz = 0; qz <= 1; ++qz)
            for (int nz = -n_max; nz <= n_max; ++nz) {
              int rz = std::abs(nz - qz) + std::abs(nz);
              int r = rx + ry + rz;
              if (r > order) continue;
              double amp_refl = std::pow(beta, r);
              if (amp_refl == 0.0) continue;
              double z =
                  (1 - 2 * qz) * source.z() + 2.0 * nz * room.dimensions.z();
              double d = (Point3(x, y, z) - mic).norm();
              images.push_back({d / room.speed_of_sound,
                                amp_refl / (4.0 * std::numbers::pi * d), r});
            }
        }
    }
  std::sort(images.begin(), images.end(),
            [](const ImageContribution &a, const ImageContribution &b) {
              if (a.delay_seconds != b.delay_seconds)
                return a.delay_seconds < b.delay_seconds;
              return a.order < b.order;
            });
  return images;
}

ImpulseResponse ImageSourceRir(const RoomSpec &room, const Point3 &source,
                               const Point3 &mic) {
  const std::vector<ImageContribution> images =
      EnumerateImages(room, source, mic);
  const double fs = room.sample_rate;
  constexpr double half = kFractionalDelayTaps / 2.0;  // 40.5
  const double max_delay = images.back().delay_seconds * fs;
  const Eigen::Index length =
      static_cast<Eigen::Index>(std::ceil(max_delay + half)) + 1;

  ImpulseResponse ir;
  ir.sample_rate = room.sample_rate;
  ir.taps = RealVector::Zero(length);
  for (const auto &im : images) {
    const double tau = im.delay_seconds * fs;
    Eigen::Index lo = static_cast<Eigen::Index>(std::ceil(tau - half));
    Eigen::Index hi = static_cast<Eigen::Index>(std::floor(tau + half));
    for (Eigen::Index k = std::max<Eigen::Index>(lo, 0); k <= hi && k < length;
         ++k) {
      double x = k - tau;
      double w = 0.5 * (1.0 + std::cos(std::numbers::pi * x / half));
      double s = std::abs(x) < 1e-12
                     ? 1.0
                     : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      ir.taps(k) += im.amplitude * w * s;
    }
  }
  const double direct = (source - mic).norm() / room.speed_of_sound * fs;
  const Eigen::Index first =
      std::max<Eigen::Index>(static_cast<Eigen::Index>(std::floor(direct)) - 1, 0);
  ir.taps.head(std::min(first, length)).setZero();
  return ir;
}

std::vector<std::vector<ImpulseResponse>> RirBank(
    const RoomSpec &room, const ScenePlacement &placement) {
  room.Validate();
  placement.Validate(room);
  std::vector<std::vector<ImpulseResponse>> bank(placement.sources.size());
  for (size_t s = 0; s < placement.sources.size(); ++s)
    for (const auto &m : placement.microphones)
      bank[s].push_back(ImageSourceRir(room, placement.sources[s], m));
  return bank;
}

std::vector<AudioBuffer> SourceImages(
    const std::vector<std::vector<ImpulseResponse>> &bank,
    const std::vector<AudioBuffer> &dry) {
  if (dry.size() != bank.size())
    throw Error("need one dry signal per source: got " +
                std::to_string(dry.size()) + " for " +
                std::to_string(bank.size()) + " sources");
  if (bank.empty() || bank[0].empty()) throw Error("empty RIR bank");
  const int fs = bank[0][0].sample_rate;
  Eigen::Index dry_len = 0, rir_len = 0;
  for (size_t s = 0; s < dry.size(); ++s) {
    if (dry[s].channels() != 1) throw Error("dry signals must be mono");
    if (dry[s].sample_rate() != fs)
      throw Error("dry signal sample rate differs from the room's");
    dry_len = std::max(dry_len, dry[s].num_samples());
    for (const auto &ir : bank[s]) rir_len = std::max(rir_len, ir.taps.size());
  }
  const Eigen::Index out_len = dry_len == 0 ? 0 : dry_len + rir_len - 1;
  const Eigen::Index mics = static_cast<Eigen::Index>(bank[0].size());
  std::vector<AudioBuffer> images;
  for (size_t s = 0; s < dry.size(); ++s) {
    RealMatrix out = RealMatrix::Zero(mics, out_len);
    RealVector x = dry[s].samples().row(0).transpose();
    for (Eigen::Index m = 0; m < mics; ++m) {
      RealVector y = FftConvolve(x, bank[s][m].taps);
      out.row(m).head(y.size()) = y.transpose();
    }
    images.emplace_back(std::move(out), fs);
  }
  return images;
}

AudioBuffer SimulateScene(
    const std::vector<std::vector<ImpulseResponse>> &bank,
    const std::vector<AudioBuffer> &dry) {
  std::vector<AudioBuffer> images = SourceImages(bank, dry);
  RealMatrix sum = images[0].samples();
  for (size_t s = 1; s < images.size(); ++s) sum += images[s].samples();
  return AudioBuffer(std::move(sum), images[0].sample_rate());
}

AudioBuffer SimulateScene(const RoomSpec &room, const ScenePlacement &placement,
                          const std::vector<AudioBuffer> &dry) {
  if (dry.size() != placement.sources.size())
    throw Error("need one dry signal per source");
  return SimulateScene(RirBank(room, placement), dry);
}

CabinPreset DefaultCabin() {
  CabinPreset preset;
  preset.room = RoomSpec{};
  for (double x : {0.8, 1.2, 1.6, 2.0}) preset.microphones.emplace_back(x, 0.75, 1.15);
  preset.seats = {Point3(1.0, 0.4, 0.95), Point3(1.0, 1.1, 0.95),
                  Point3(2.1, 0.4, 0.95), Point3(2.1, 1.1, 0.95)};
  return preset;
}

namespace {
Point3 ParsePoint(const std::string &text) {
  std::vector<double> v = ParseDoubles(text);
  if (v.size() != 3) throw Error("expected 'x y z', got: " + text);
  return Point3(v[0], v[1], v[2]);
}
}  // namespace

void RoomFromConfig(const KeyValueConfig &config, RoomSpec *room,
                    ScenePlacement *placement) {
  CabinPreset preset = DefaultCabin();
  *room = preset.room;
  if (config.Has("room.dims")) room->dimensions = ParsePoint(config.Get("room.dims"));
  room->absorption = config.GetDouble("room.absorption", room->absorption);
  room->max_order = config.GetInt("room.max_order", room->max_order);
  room->speed_of_sound =
      config.GetDouble("room.speed_of_sound", room->speed_of_sound);
  room->sample_rate = config.GetInt("room.sample_rate", room->sample_rate);
  room->Validate();
  if (placement) {
    placement->sources.clear();
    placement->microphones.clear();
    for (const auto &s : config.GetAll("source"))
      placement->sources.push_back(ParsePoint(s));
    for (const auto &m : config.GetAll("mic"))
      placement->microphones.push_back(ParsePoint(m));
    if (placement->sources.empty()) placement->sources = preset.seats;
    if (placement->microphones.empty())
      placement->microphones = preset.microphones;
    placement->Validate(*room);
  }
}

}  // namespace incar

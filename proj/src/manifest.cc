// manifest.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/manifest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "incar/wav.h"

namespace incar {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

ManifestEntry FromJson(const json &j) {
  ManifestEntry e;
  e.id = j.at("id").get<std::string>();
  e.path = j.at("path").get<std::string>();
  if (e.id.empty()) throw Error("empty utterance id");
  if (j.contains("channels")) e.channels = j["channels"].get<std::vector<int>>();
  e.onset = j.value("onset", 0.0);
  e.duration = j.value("duration", 0.0);
  e.speaker = j.value("speaker", std::string());
  if (j.contains("transcription") && !j["transcription"].is_null())
    e.transcription = j["transcription"].get<std::string>();
  if (j.contains("meta")) e.meta = j["meta"];
  if (e.onset < 0.0 || e.duration < 0.0) throw Error("negative onset or duration");
  return e;
}

json ToJson(const ManifestEntry &e) {
  json j;
  j["id"] = e.id;
  j["path"] = e.path;
  if (!e.channels.empty()) j["channels"] = e.channels;
  j["onset"] = e.onset;
  j["duration"] = e.duration;
  if (!e.speaker.empty()) j["speaker"] = e.speaker;
  if (e.transcription) j["transcription"] = *e.transcription;
  if (!e.meta.empty()) j["meta"] = e.meta;
  return j;
}

}  // namespace

Manifest ReadManifest(std::istream &is) {
  Manifest m;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      m.push_back(FromJson(json::parse(line)));
    } catch (const std::exception &e) {
      throw Error("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return m;
}

Manifest ReadManifest(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open manifest " + path);
  Manifest m = ReadManifest(is);
  const fs::path dir = fs::path(path).parent_path();
  for (auto &e : m)
    if (fs::path(e.path).is_relative()) e.path = (dir / e.path).lexically_normal().string();
  return m;
}

void WriteManifest(std::ostream &os, const Manifest &manifest) {
  for (const auto &e : manifest) os << ToJson(e).dump() << '\n';
}

void WriteManifest(const std::string &path, const Manifest &manifest) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp);
    WriteManifest(os, manifest);
    if (!os) throw Error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

void ValidateManifest(const Manifest &manifest, bool check_paths) {
  std::set<std::string> ids;
  for (const auto &e : manifest) {
    if (!ids.insert(e.id).second) throw Error("duplicate utterance id " + e.id);
    if (check_paths && !fs::exists(e.path))
      throw Error("utterance " + e.id + ": missing file " + e.path);
  }
}

AudioBuffer LoadEntryAudio(const ManifestEntry &entry) {
  AudioBuffer audio = ReadWav(entry.path);
  const int fs = audio.sample_rate();
  const Eigen::Index begin = std::llround(entry.onset * fs);
  const Eigen::Index count = entry.duration > 0.0
                                 ? std::llround(entry.duration * fs)
                                 : std::max<Eigen::Index>(audio.num_samples() - begin, 0);
  if (begin + count > audio.num_samples() + 1)
    throw Error("utterance " + entry.id + " exceeds " + entry.path);
  AudioBuffer cut = audio.Slice(begin, count);
  if (entry.channels.empty()) return cut;
  RealMatrix picked(entry.channels.size(), cut.num_samples());
  for (size_t i = 0; i < entry.channels.size(); ++i) {
    const int c = entry.channels[i];
    if (c < 0 || c >= cut.channels())
      throw Error("utterance " + entry.id + ": channel " + std::to_string(c) + " out of range");
    picked.row(i) = cut.channel(c);
  }
  return AudioBuffer(std::move(picked), fs);
}

}  // namespace incar

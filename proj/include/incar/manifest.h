// manifest.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// JSON-lines manifests, one utterance per line.

#ifndef INCAR_MANIFEST_H_
#define INCAR_MANIFEST_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "incar/core.h"

namespace incar {

struct ManifestEntry {
  std::string id;
  std::string path;
  std::vector<int> channels;  // empty selects every channel
  double onset = 0.0;
  double duration = 0.0;  // 0 reads to the end of the file
  std::string speaker;
  std::optional<std::string> transcription;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();

  bool operator==(const ManifestEntry &) const = default;
};

using Manifest = std::vector<ManifestEntry>;

// Throws with the line number on malformed JSON or missing id/path.
// Relative paths are kept as written.
Manifest ReadManifest(std::istream &is);
// Relative paths are resolved against the manifest's directory.
Manifest ReadManifest(const std::string &path);

void WriteManifest(std::ostream &os, const Manifest &manifest);
// Writes to a temporary name and renames.
void WriteManifest(const std::string &path, const Manifest &manifest);

// Throws on duplicate ids and, when check_paths is set, missing files.
void ValidateManifest(const Manifest &manifest, bool check_paths = true);

// Reads the entry's channels over [onset, onset + duration).
AudioBuffer LoadEntryAudio(const ManifestEntry &entry);

}  // namespace incar

#endif  // INCAR_MANIFEST_H_

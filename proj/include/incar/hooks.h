// hooks.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// External command hooks (ASR scoring, denoising).

#ifndef INCAR_HOOKS_H_
#define INCAR_HOOKS_H_

#include <functional>
#include <optional>
#include <string>

#include "incar/core.h"

namespace incar {

struct HookSpec {
  // Shell command; {in} and {out} are replaced by quoted file paths.
  std::string command;
  double timeout_seconds = 60.0;
  int expected_exit_code = 0;

  // Throws unless both placeholders are present and the timeout is positive.
  void Validate() const;
  // "<command>" or "<command>;timeout=<s>;exit=<code>".
  static HookSpec Parse(const std::string &text);
};

// Runs the hook through /bin/sh. Throws HookError on timeout (the child
// is killed), abnormal termination or an unexpected exit code.
void RunHook(const HookSpec &hook, const std::string &in_path, const std::string &out_path);

// Score of one candidate; nullopt marks a failed scoring.
using Scorer = std::function<std::optional<double>(
    const std::string &utterance_id, const std::string &tag, const AudioBuffer &audio)>;

// Audio-to-audio transform; throws on failure.
using Denoiser = std::function<AudioBuffer(const AudioBuffer &)>;

// Scorer that writes the candidate to a WAV, runs the hook and reads the
// first number of the output file. Failures are logged and yield nullopt.
Scorer HookScorer(const HookSpec &hook, const std::string &work_dir);

// Denoiser that round-trips through WAV files; throws HookError.
Denoiser HookDenoiser(const HookSpec &hook, const std::string &work_dir);

}  // namespace incar

#endif  // INCAR_HOOKS_H_

// hooks.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/hooks.h"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "incar/log.h"
#include "incar/wav.h"

namespace incar {

namespace fs = std::filesystem;

void HookSpec::Validate() const {
  if (command.find("{in}") == std::string::npos || command.find("{out}") == std::string::npos)
    throw HookError("hook command must contain {in} and {out}: " + command);
  if (!(timeout_seconds > 0.0)) throw HookError("hook timeout must be positive");
}

HookSpec HookSpec::Parse(const std::string &text) {
  HookSpec hook;
  std::string rest = text;
  // Trailing ;key=value options.
  for (;;) {
    const size_t semi = rest.rfind(';');
    if (semi == std::string::npos) break;
    const std::string opt = rest.substr(semi + 1);
    try {
      if (opt.rfind("timeout=", 0) == 0) {
        hook.timeout_seconds = std::stod(opt.substr(8));
      } else if (opt.rfind("exit=", 0) == 0) {
        hook.expected_exit_code = std::stoi(opt.substr(5));
      } else {
        break;
      }
    } catch (const std::logic_error &) {
      throw HookError("bad hook option: " + opt);
    }
    rest.resize(semi);
  }
  hook.command = rest;
  hook.Validate();
  return hook;
}

namespace {

std::string ShellQuote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string Substitute(std::string cmd, const std::string &key, const std::string &value) {
  for (size_t pos = cmd.find(key); pos != std::string::npos;
       pos = cmd.find(key, pos + value.size()))
    cmd.replace(pos, key.size(), value);
  return cmd;
}

std::string UniqueName(const std::string &dir, const std::string &stem) {
  static std::atomic<uint64_t> counter{0};
  return (fs::path(dir) / (stem + "." + std::to_string(::getpid()) + "." +
                           std::to_string(counter++)))
      .string();
}

}  // namespace

void RunHook(const HookSpec &hook, const std::string &in_path, const std::string &out_path) {
  hook.Validate();
  std::string cmd = Substitute(hook.command, "{in}", ShellQuote(in_path));
  cmd = Substitute(cmd, "{out}", ShellQuote(out_path));

  const pid_t pid = ::fork();
  if (pid < 0) throw HookError("fork failed for hook: " + hook.command);
  if (pid == 0) {
    ::setpgid(0, 0);
    ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(hook.timeout_seconds);
  int status = 0;
  for (;;) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw HookError("waitpid failed for hook: " + hook.command);
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw HookError("hook timed out after " + std::to_string(hook.timeout_seconds) +
                      " s: " + hook.command);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (!WIFEXITED(status)) throw HookError("hook terminated abnormally: " + hook.command);
  const int code = WEXITSTATUS(status);
  if (code != hook.expected_exit_code)
    throw HookError("hook exited with " + std::to_string(code) + " (expected " +
                    std::to_string(hook.expected_exit_code) + "): " + hook.command);
}

Scorer HookScorer(const HookSpec &hook, const std::string &work_dir) {
  hook.Validate();
  return [hook, work_dir](const std::string &id, const std::string &tag,
                          const AudioBuffer &audio) -> std::optional<double> {
    const std::string base = UniqueName(work_dir, id + "." + tag);
    const std::string in = base + ".wav", out = base + ".score";
    std::optional<double> score;
    try {
      WriteWav(in, audio, WavFormat::kFloat32);
      RunHook(hook, in, out);
      std::ifstream is(out);
      double v;
      if (!(is >> v) || !std::isfinite(v)) throw HookError("hook wrote no finite score");
      score = v;
    } catch (const Error &e) {
      INCAR_WARN << "scoring " << id << "/" << tag << " failed: " << e.what();
    }
    std::error_code ec;
    fs::remove(in, ec);
    fs::remove(out, ec);
    return score;
  };
}

Denoiser HookDenoiser(const HookSpec &hook, const std::string &work_dir) {
  hook.Validate();
  return [hook, work_dir](const AudioBuffer &audio) {
    const std::string base = UniqueName(work_dir, "denoise");
    const std::string in = base + ".in.wav", out = base + ".out.wav";
    struct Cleanup {
      std::string a, b;
      ~Cleanup() {
        std::error_code ec;
        fs::remove(a, ec);
        fs::remove(b, ec);
      }
    } cleanup{in, out};
    WriteWav(in, audio, WavFormat::kFloat32);
    RunHook(hook, in, out);
    AudioBuffer result;
    try {
      result = ReadWav(out);
    } catch (const Error &e) {
      throw HookError(std::string("denoise hook output unreadable: ") + e.what());
    }
    if (result.sample_rate() != audio.sample_rate() ||
        result.channels() != audio.channels())
      throw HookError("denoise hook changed the sample rate or channel count");
    // Length drift of a few samples is tolerated.
    return result.Slice(0, audio.num_samples());
  };
}

}  // namespace incar

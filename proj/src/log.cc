// log.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/log.h"

#include <iostream>
#include <mutex>

namespace incar {

namespace {
std::mutex &SinkMutex() {
  static std::mutex m;
  return m;
}
LogSink &Sink() {
  static LogSink sink = [](LogLevel level, const std::string &msg) {
    std::cerr << (level == LogLevel::kWarning ? "WARNING: " : "LOG: ") << msg
              << '\n';
  };
  return sink;
}
}  // namespace

LogSink SetLogSink(LogSink sink) {
  std::lock_guard<std::mutex> lock(SinkMutex());
  std::swap(Sink(), sink);
  return sink;
}

void Log(LogLevel level, const std::string &message) {
  std::lock_guard<std::mutex> lock(SinkMutex());
  if (Sink()) Sink()(level, message);
}

}  // namespace incar

// log.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_LOG_H_
#define INCAR_LOG_H_

#include <functional>
#include <sstream>
#include <string>

namespace incar {

enum class LogLevel { kInfo, kWarning };

using LogSink = std::function<void(LogLevel, const std::string &)>;

// Replaces the process-wide sink (stderr by default). Returns the old one.
LogSink SetLogSink(LogSink sink);
void Log(LogLevel level, const std::string &message);

namespace internal {
class LogMessage {
 public:
  explicit LogMessage(LogLevel level) : level_(level) {}
  ~LogMessage() { Log(level_, stream_.str()); }
  template <typename T>
  LogMessage &operator<<(const T &v) {
    stream_ << v;
    return *this;
  }

 private:
  LogLevel level_;
  std::ostringstream stream_;
};
}  // namespace internal

}  // namespace incar

#define INCAR_LOG ::incar::internal::LogMessage(::incar::LogLevel::kInfo)
#define INCAR_WARN ::incar::internal::LogMessage(::incar::LogLevel::kWarning)

#endif  // INCAR_LOG_H_

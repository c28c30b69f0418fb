// SPDX-License-Identifier: Apache-2.0
#include "localdeform/log.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace localdeform {

namespace {

std::mutex sink_mutex;

LogSink& sink_slot() {
  static LogSink sink = [](LogLevel level, const std::string& message) {
    if (level == LogLevel::Warning) {
      std::fprintf(stderr, "warning: %s\n", message.c_str());
    }
  };
  return sink;
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  sink_slot() = std::move(sink);
}

void log_info(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  if (sink_slot()) sink_slot()(LogLevel::Info, message);
}

void log_warning(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  if (sink_slot()) sink_slot()(LogLevel::Warning, message);
}

}  // namespace localdeform

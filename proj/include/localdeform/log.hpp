// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

namespace localdeform {

enum class LogLevel { Info, Warning };

using LogSink = std::function<void(LogLevel, const std::string&)>;

/// Replace the process-wide log sink (default writes warnings to stderr).
void set_log_sink(LogSink sink);

void log_info(const std::string& message);
void log_warning(const std::string& message);

}  // namespace localdeform

/* Copyright 2026 The glyphfuse Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "glyphfuse/pipeline/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace glyphfuse::log {

Level Threshold() {
  static const Level level = [] {
    const char* env = std::getenv("GLYPHFUSE_LOG_LEVEL");
    const std::string v = env ? env : "";
    if (v == "debug") return Level::kDebug;
    if (v == "info") return Level::kInfo;
    if (v == "error") return Level::kError;
    if (v == "off") return Level::kOff;
    return Level::kWarn;
  }();
  return level;
}

void Write(Level level, std::string_view message) {
  if (level < Threshold()) return;
  static std::mutex mutex;
  static constexpr const char* kNames[] = {"debug", "info", "warn", "error"};
  std::lock_guard lock(mutex);
  std::cerr << "[" << kNames[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace glyphfuse::log

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
#pragma once

#include <string>
#include <vector>

#include "glyphfuse/error.hpp"

namespace glyphfuse::cli {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumericalFailure = 3 };

/// Data errors map to 2, solver and training failures to 3.
int ExitCodeFor(ErrorCode code);

/// Entry point of the `glyphfuse` tool.
int Run(int argc, const char* const* argv);

/// Convenience for tests: args exclude the program name.
int Run(const std::vector<std::string>& args);

}  // namespace glyphfuse::cli

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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace glyphfuse::fusion {

/// ||analytic - numeric|| / max(||analytic||, ||numeric||), 0 when both vanish.
double RelativeError(std::span<const double> analytic, std::span<const double> numeric);

/// Central differences of `loss` with respect to every entry of `param`.
std::vector<double> NumericGradient(std::span<double> param, const std::function<double()>& loss,
                                    double step = 1e-6);

struct GradientCheck {
  std::string name;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct InvariantCheck {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct FuseCheckReport {
  std::uint64_t seed = 0;
  int batch = 0, tokens = 0, channels = 0;
  std::vector<int> layers;
  std::vector<GradientCheck> gradients;
  std::vector<InvariantCheck> invariants;

  bool pass() const;
};

/// Gradient checks of every fusion op and the composed denoiser loss, plus the
/// fusion invariants, on random float64 inputs of the given dimensions.
FuseCheckReport RunFuseCheck(std::uint64_t seed, int batch, int tokens, int channels,
                             const std::vector<int>& layers, double tolerance = 1e-5);

void WriteFuseCheckReport(std::ostream& out, const FuseCheckReport& report);

}  // namespace glyphfuse::fusion

// Copyright 2026 The SSANC Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sample-recursive simulation of the controlled hearable.
//
// Per sample n:
//   y(n)     = sum_k (w_k * x_k)(n - ff_latency) + (w_{K+1} * p_hat)(n - fb_latency)
//   e(n)     = p(n) + (g_true * y)(n)
//   p_hat(n) = e(n) - (g_hat * y)(n)
//
// Feedback from the loudspeaker to the outer microphones is taken as
// perfectly cancelled and is not simulated.

#ifndef SSANC_CLOSED_LOOP_SIM_H_
#define SSANC_CLOSED_LOOP_SIM_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ssanc/dsp_core.h"
#include "ssanc/filter_design.h"

namespace ssanc {

struct LoopConfig {
  int ff_latency = 2;
  int fb_latency = 3;
  // Absolute divergence bound on |e| and |y|. Unset: instability_factor
  // times the peak input amplitude of the run.
  std::optional<double> instability_threshold;
  double instability_factor = 1e6;
  // 0 simulates every sample.
  std::size_t max_samples = 0;

  void Validate() const;
};

struct ScenarioSignals {
  MultichannelSignal outer_mics;    // x_k, mixture
  std::vector<double> leakage_speech;  // p_s
  std::vector<double> leakage_noise;   // p_v
  MultichannelSignal outer_speech;  // speech component of x_k

  int sample_rate() const { return outer_mics.sample_rate(); }
  std::size_t num_samples() const { return outer_mics.num_samples(); }
  int num_outer() const { return outer_mics.num_channels(); }
  std::vector<double> Leakage() const;
  MultichannelSignal OuterNoise() const;
  void Validate() const;
};

struct LoopOutput {
  std::vector<double> error;
  std::vector<double> loudspeaker;
  std::vector<double> leakage_estimate;
  bool stable = true;
  std::optional<std::size_t> divergence_sample;
};

LoopOutput SimulateLoop(const StackedControlFilter& w,
                        const ImpulseResponse& g_true,
                        const ImpulseResponse& g_hat,
                        const MultichannelSignal& outer,
                        std::span<const double> leakage,
                        const LoopConfig& cfg);

struct ComponentOutput {
  std::vector<double> e_s;
  std::vector<double> e_v;
  std::vector<double> e;
  bool stable = true;
};

// Runs the loop once on the speech component and once on the noise
// component; e = e_s + e_v by linearity.
ComponentOutput SimulateComponents(const StackedControlFilter& w,
                                   const ImpulseResponse& g_true,
                                   const ImpulseResponse& g_hat,
                                   const ScenarioSignals& signals,
                                   const LoopConfig& cfg);

}  // namespace ssanc

#endif  // SSANC_CLOSED_LOOP_SIM_H_

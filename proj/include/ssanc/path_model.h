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

// Least-squares FIR identification and the synthetic secondary-path ensemble.

#ifndef SSANC_PATH_MODEL_H_
#define SSANC_PATH_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ssanc/dsp_core.h"

namespace ssanc {

struct FirEstimate {
  ImpulseResponse response;
  // Sum of squared output error of the fitted model.
  double residual;
};

// Order-length FIR h minimizing sum_n (response[n] - (h * excitation)[n])^2
// under the same-length causal model. Requires
// len(excitation) == len(response) >= 4 * order.
FirEstimate IdentifyFirLs(std::span<const double> excitation,
                          std::span<const double> response, int order,
                          int sample_rate);

// Relative impulse responses of every entry of `ir_to_mics` with respect to
// entry `reference_index`, with acausal_length taps at negative lags and
// causal_length taps at lags >= 0. Solved from the white-noise normal
// equations of the absolute responses (infinite-length excitation limit).
std::vector<AcausalKernel> IdentifyReirSet(
    const std::vector<ImpulseResponse>& ir_to_mics, int reference_index,
    int acausal_length, int causal_length);

struct VariationSpec {
  double magnitude_db_std = 3.0;
  int n_bands = 24;
  double phase_jitter_std = 0.2;
  int window_length = 0;
  std::uint64_t seed = 0;

  void Validate(int path_length) const;
};

// The library defaults, with window_length = path_length / 4.
VariationSpec DefaultVariationSpec(int path_length, std::uint64_t seed = 0);

// Band centres (Hz) at which the random log-magnitude and phase values are
// drawn: n_bands log-spaced points ending at 0.45 * sample_rate.
std::vector<double> PerturbationBandCenters(const VariationSpec& spec,
                                            int sample_rate);

// The causal perturbation filter v_j (window_length taps) of variant `index`.
std::vector<double> PerturbationFilter(const VariationSpec& spec, int index,
                                       int sample_rate);

struct PathEnsemble {
  ImpulseResponse nominal;
  std::vector<ImpulseResponse> variants;
  std::vector<std::string> labels;
  VariationSpec spec;
  // True when the variants come from the parametric generator.
  bool generated = false;

  int size() const { return static_cast<int>(variants.size()); }
  int path_length() const { return static_cast<int>(nominal.size()); }
  ImpulseResponse Mean() const;
  void Validate() const;
};

PathEnsemble GeneratePathEnsemble(const ImpulseResponse& nominal,
                                  const VariationSpec& spec, int count);

// Directory layout: ensemble.json, nominal.wav and one float32 WAV per
// variant (file names listed in the manifest).
void SavePathEnsemble(const PathEnsemble& ensemble, const std::string& dir);
PathEnsemble LoadPathEnsemble(const std::string& dir);

}  // namespace ssanc

#endif  // SSANC_PATH_MODEL_H_

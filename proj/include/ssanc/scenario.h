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

// Synthetic hearable scenes and their on-disk form.
//
// One speech-like source (modulated coloured noise) and two coloured noise
// interferers reach K outer microphones and the eardrum leakage point
// through sparse fractional-delay impulse responses. The noise is scaled so
// that the leakage SNR hits the requested value exactly.

#ifndef SSANC_SCENARIO_H_
#define SSANC_SCENARIO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ssanc/closed_loop_sim.h"
#include "ssanc/dsp_core.h"

namespace ssanc {

struct SceneSpec {
  int num_outer_mics = 2;
  int sample_rate = 8000;
  double duration_s = 2.0;
  double target_snr_db = -7.0;
  double speech_gain = 1.0;
  double noise_gain = 1.0;
  // Common scale applied after SNR matching.
  double level = 60.0;
  // Std-dev of white sensor noise on every microphone (before scaling).
  double sensor_noise = 0.03;
  int ir_length = 200;
  // Extra acoustic delay (samples) of the eardrum leakage relative to the
  // outer microphones.
  double leakage_extra_delay = 4.0;
  int path_length = 32;
  std::uint64_t seed = 1;

  void Validate() const;
};

struct SyntheticScenario {
  ScenarioSignals signals;
  // Speech-source responses to the K outer mics followed by the leakage
  // point; the ReIRs are identified from these.
  std::vector<ImpulseResponse> speech_irs;
  int reference_mic = 0;
  // Nominal secondary path.
  ImpulseResponse secondary_path;
};

SyntheticScenario GenerateSyntheticScenario(const SceneSpec& spec);

// The decaying resonant loudspeaker-to-eardrum response used as the
// nominal secondary path of synthetic scenes.
ImpulseResponse NominalSecondaryPath(int length, int sample_rate);

// Directory layout: scenario.json, scenario.wav (outer mics, leak_s,
// leak_v, outer speech), speech_irs.wav, secondary_path.wav. The manifest
// may also name an ensemble directory relative to itself.
void SaveScenario(const SyntheticScenario& scenario, const std::string& dir,
                  const std::string& ensemble_dir = "");

struct LoadedScenario {
  SyntheticScenario scenario;
  std::string ensemble_dir;  // absolute or empty
};

LoadedScenario LoadScenario(const std::string& dir);

}  // namespace ssanc

#endif  // SSANC_SCENARIO_H_

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

#include "ssanc/scenario.h"

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "ssanc/errors.h"
#include "ssanc/metrics.h"

namespace ssanc {
namespace {

SceneSpec SmallSpec() {
  SceneSpec spec;
  spec.duration_s = 1.0;
  return spec;
}

TEST(ScenarioTest, HitsLeakageSnrTarget) {
  for (double target : {-7.0, 0.0, 5.5}) {
    SceneSpec spec = SmallSpec();
    spec.target_snr_db = target;
    const SyntheticScenario s = GenerateSyntheticScenario(spec);
    EXPECT_NEAR(SnrDb(s.signals.leakage_speech, s.signals.leakage_noise), target,
                0.01);
  }
}

TEST(ScenarioTest, EarPairAveragesToTarget) {
  SceneSpec left = SmallSpec();
  left.target_snr_db = -6.6;
  left.seed = 3;
  SceneSpec right = SmallSpec();
  right.target_snr_db = -7.2;
  right.seed = 4;
  const SyntheticScenario l = GenerateSyntheticScenario(left);
  const SyntheticScenario r = GenerateSyntheticScenario(right);
  const double mean =
      0.5 * (SnrDb(l.signals.leakage_speech, l.signals.leakage_noise) +
             SnrDb(r.signals.leakage_speech, r.signals.leakage_noise));
  EXPECT_NEAR(mean, -6.9, 0.2);
}

TEST(ScenarioTest, ZeroNoiseGainSilencesNoise) {
  SceneSpec spec = SmallSpec();
  spec.noise_gain = 0.0;
  spec.sensor_noise = 0.0;
  const SyntheticScenario s = GenerateSyntheticScenario(spec);
  for (double v : s.signals.leakage_noise) ASSERT_EQ(v, 0.0);
  const MultichannelSignal noise = s.signals.OuterNoise();
  for (int k = 0; k < noise.num_channels(); ++k) {
    for (double v : noise.channel(k)) ASSERT_EQ(v, 0.0);
  }
}

TEST(ScenarioTest, DeterministicPerSeed) {
  const SyntheticScenario a = GenerateSyntheticScenario(SmallSpec());
  const SyntheticScenario b = GenerateSyntheticScenario(SmallSpec());
  EXPECT_EQ(a.signals.outer_mics.channels(), b.signals.outer_mics.channels());
  EXPECT_EQ(a.signals.leakage_speech, b.signals.leakage_speech);
  EXPECT_EQ(a.signals.leakage_noise, b.signals.leakage_noise);
  SceneSpec other = SmallSpec();
  other.seed = 2;
  const SyntheticScenario c = GenerateSyntheticScenario(other);
  EXPECT_NE(a.signals.leakage_speech, c.signals.leakage_speech);
}

TEST(ScenarioTest, ShapesAndDecomposition) {
  const SceneSpec spec = SmallSpec();
  const SyntheticScenario s = GenerateSyntheticScenario(spec);
  EXPECT_EQ(s.signals.num_outer(), spec.num_outer_mics);
  EXPECT_EQ(s.signals.num_samples(), static_cast<std::size_t>(spec.sample_rate));
  EXPECT_EQ(s.speech_irs.size(), static_cast<std::size_t>(spec.num_outer_mics + 1));
  EXPECT_EQ(s.secondary_path.size(), static_cast<std::size_t>(spec.path_length));
  const std::vector<double> p = s.signals.Leakage();
  for (std::size_t n = 0; n < p.size(); ++n) {
    EXPECT_DOUBLE_EQ(p[n], s.signals.leakage_speech[n] + s.signals.leakage_noise[n]);
  }
}

TEST(ScenarioTest, SilentSpeechIsGenerationError) {
  SceneSpec spec = SmallSpec();
  spec.speech_gain = 0.0;
  EXPECT_THROW(GenerateSyntheticScenario(spec), ConfigError);
  spec = SmallSpec();
  spec.num_outer_mics = 0;
  EXPECT_THROW(GenerateSyntheticScenario(spec), ConfigError);
}

TEST(ScenarioTest, SaveLoadRoundTrip) {
  const SyntheticScenario s = GenerateSyntheticScenario(SmallSpec());
  const auto dir = std::filesystem::temp_directory_path() / "ssanc_scene_test";
  std::filesystem::remove_all(dir);
  SaveScenario(s, dir.string(), "ens");
  const LoadedScenario r = LoadScenario(dir.string());
  EXPECT_EQ(r.ensemble_dir, (dir / "ens").string());
  ASSERT_EQ(r.scenario.signals.num_outer(), s.signals.num_outer());
  for (std::size_t n = 0; n < s.signals.num_samples(); n += 97) {
    EXPECT_EQ(r.scenario.signals.leakage_noise[n],
              static_cast<double>(static_cast<float>(s.signals.leakage_noise[n])));
  }
  EXPECT_EQ(r.scenario.reference_mic, s.reference_mic);
  EXPECT_THROW(LoadScenario((dir / "nope").string()), IoError);
}

}  // namespace
}  // namespace ssanc

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

// Run settings: a nested YAML file whose leaves are addressed by dotted keys
// ("design.filter_length"). The same keys are accepted as command-line
// overrides.

#ifndef SSANC_CONFIG_H_
#define SSANC_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ssanc/case_study.h"
#include "ssanc/path_model.h"
#include "ssanc/scenario.h"

namespace ssanc {

struct Settings {
  CaseStudyConfig study;
  // The mu grid is log-spaced from mu_min to mu_max unless mu_list is set.
  double mu_min = 1.0;
  double mu_max = 3000.0;
  int mu_points = 8;
  std::vector<double> mu_list;
  SceneSpec scene;
  int ensemble_size = 44;
  VariationSpec variation;
  std::uint64_t seed = 1;

  // Pushes the derived values (mu grid, seeds, shared lengths) into the
  // nested structures and validates the result. Throws ConfigError.
  void Finalize();
};

// Full-scale defaults: 40 kHz, four outer mics, 1800-tap filters and paths,
// 4500-tap ReIR halves, a 240-sample delay and a 44-path ensemble.
Settings FullScaleDefaults();
// Small dimensions for quick runs and tests.
Settings DeskScalePreset();

struct SettingKey {
  std::string key;
  std::string help;
};

// Every recognised dotted key, in file order.
const std::vector<SettingKey>& SettingKeys();

// Sets one leaf from its textual value. Lists (study.cases, study.mu_list)
// are comma separated. Throws ConfigError on unknown keys or bad values.
void ApplySetting(Settings& s, const std::string& key,
                  const std::string& value);
std::string GetSetting(const Settings& s, const std::string& key);

// Applies every leaf of a YAML document on top of `base`.
Settings ParseSettingsYaml(const std::string& text, Settings base);
Settings LoadSettingsFile(const std::string& path, Settings base);
std::string SettingsToYaml(const Settings& s);

}  // namespace ssanc

#endif  // SSANC_CONFIG_H_

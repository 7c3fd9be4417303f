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

#include "ssanc/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "ssanc/errors.h"

namespace ssanc {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long ParseInt(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(Trim(v), &used);
    if (used == Trim(v).size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
}

double ParseDouble(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(Trim(v), &used);
    if (used == Trim(v).size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, v));
}

std::string Num(double v) { return fmt::format("{}", v); }

const char* SolverName(SolverKind k) {
  switch (k) {
    case SolverKind::kAuto:
      return "auto";
    case SolverKind::kCholesky:
      return "cholesky";
    case SolverKind::kConjugateGradient:
      return "cg";
  }
  return "auto";
}

struct Field {
  SettingKey name;
  std::function<std::string(const Settings&)> get;
  std::function<void(Settings&, const std::string&)> set;
};

template <typename Ref>
Field IntField(const char* key, const char* help, Ref ref) {
  return {{key, help},
          [ref](const Settings& s) {
            return fmt::format("{}", ref(const_cast<Settings&>(s)));
          },
          [ref, key](Settings& s, const std::string& v) {
            using T = std::remove_reference_t<decltype(ref(s))>;
            const long long x = ParseInt(key, v);
            if (std::is_unsigned_v<T> && x < 0) {
              throw ConfigError(fmt::format("{}: must be >= 0", key));
            }
            ref(s) = static_cast<T>(x);
          }};
}

template <typename Ref>
Field DoubleField(const char* key, const char* help, Ref ref) {
  return {{key, help},
          [ref](const Settings& s) { return Num(ref(const_cast<Settings&>(s))); },
          [ref, key](Settings& s, const std::string& v) {
            ref(s) = ParseDouble(key, v);
          }};
}

#define SSANC_REF(expr) [](Settings& s) -> auto& { return s.expr; }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(IntField("design.filter_length", "control filter taps per channel",
                         SSANC_REF(study.design.filter_length)));
    f.push_back(IntField("design.path_length", "secondary path taps",
                         SSANC_REF(study.design.path_length)));
    f.push_back(IntField("design.reir_acausal_length", "ReIR taps at negative lags",
                         SSANC_REF(study.design.reir_acausal_length)));
    f.push_back(IntField("design.reir_causal_length", "ReIR taps at lags >= 0",
                         SSANC_REF(study.design.reir_causal_length)));
    f.push_back(IntField("design.delay", "target delay in samples",
                         SSANC_REF(study.design.delay)));
    f.push_back(DoubleField("design.alpha", "speech amplification factor",
                            SSANC_REF(study.design.alpha)));
    f.push_back(DoubleField("design.beta_divisor",
                            "beta_ff = lambda_max / beta_divisor",
                            SSANC_REF(study.design.rule.beta_ff_divisor)));
    f.push_back(DoubleField("design.beta_fb_multiplier",
                            "beta_fb = beta_fb_multiplier * beta_ff",
                            SSANC_REF(study.design.rule.beta_fb_multiplier)));
    f.push_back(IntField("design.reference_mic", "reference outer mic index",
                         SSANC_REF(study.design.reference_mic)));
    f.push_back(IntField("design.correlation_hop", "frame hop for R",
                         SSANC_REF(study.design.correlation_hop)));
    f.push_back(IntField("design.dense_threshold",
                         "largest dimension for which R is held densely",
                         SSANC_REF(study.design.dense_threshold)));
    f.push_back({{"design.solver", "auto, cholesky or cg"},
                 [](const Settings& s) {
                   return std::string(SolverName(s.study.design.solver.kind));
                 },
                 [](Settings& s, const std::string& v) {
                   const std::string t = Trim(v);
                   if (t == "auto") {
                     s.study.design.solver.kind = SolverKind::kAuto;
                   } else if (t == "cholesky") {
                     s.study.design.solver.kind = SolverKind::kCholesky;
                   } else if (t == "cg") {
                     s.study.design.solver.kind = SolverKind::kConjugateGradient;
                   } else {
                     throw ConfigError(fmt::format(
                         "design.solver: '{}' is not auto, cholesky or cg", v));
                   }
                 }});
    f.push_back(IntField("design.cg_threshold",
                         "auto solver uses CG above this many unknowns",
                         SSANC_REF(study.design.solver.cg_threshold)));
    f.push_back(DoubleField("design.cg_tolerance", "CG relative residual",
                            SSANC_REF(study.design.solver.cg_tolerance)));
    f.push_back(IntField("design.cg_max_iterations", "0: ten times the dimension",
                         SSANC_REF(study.design.solver.cg_max_iterations)));
    f.push_back(IntField("latency.feedforward", "feedforward latency (samples)",
                         SSANC_REF(study.loop.ff_latency)));
    f.push_back(IntField("latency.feedback", "feedback latency (samples, >= 1)",
                         SSANC_REF(study.loop.fb_latency)));
    f.push_back(DoubleField("loop.instability_factor",
                            "divergence bound relative to the input peak",
                            SSANC_REF(study.loop.instability_factor)));
    f.push_back({{"loop.instability_threshold",
                  "absolute divergence bound, 0 for the relative one"},
                 [](const Settings& s) {
                   return Num(s.study.loop.instability_threshold.value_or(0.0));
                 },
                 [](Settings& s, const std::string& v) {
                   const double x = ParseDouble("loop.instability_threshold", v);
                   if (x < 0.0) {
                     throw ConfigError("loop.instability_threshold: must be >= 0");
                   }
                   if (x == 0.0) {
                     s.study.loop.instability_threshold.reset();
                   } else {
                     s.study.loop.instability_threshold = x;
                   }
                 }});
    f.push_back(DoubleField("study.mu_min", "smallest mu", SSANC_REF(mu_min)));
    f.push_back(DoubleField("study.mu_max", "largest mu", SSANC_REF(mu_max)));
    f.push_back(IntField("study.mu_points", "log-spaced mu points",
                         SSANC_REF(mu_points)));
    f.push_back({{"study.mu_list", "explicit mu values, overrides the range"},
                 [](const Settings& s) {
                   std::string out;
                   for (std::size_t i = 0; i < s.mu_list.size(); ++i) {
                     out += (i ? "," : "") + Num(s.mu_list[i]);
                   }
                   return out;
                 },
                 [](Settings& s, const std::string& v) {
                   s.mu_list.clear();
                   for (const auto& item : SplitList(v)) {
                     s.mu_list.push_back(ParseDouble("study.mu_list", item));
                   }
                 }});
    f.push_back({{"study.cases", "subset of matched, mismatched, robust"},
                 [](const Settings& s) {
                   std::string out;
                   for (std::size_t i = 0; i < s.study.cases.size(); ++i) {
                     out += (i ? "," : "") + std::string(CaseName(s.study.cases[i]));
                   }
                   return out;
                 },
                 [](Settings& s, const std::string& v) {
                   s.study.cases.clear();
                   for (const auto& item : SplitList(v)) {
                     s.study.cases.push_back(ParseCaseName(item));
                   }
                 }});
    f.push_back(DoubleField("study.percentile_low", "lower percentile",
                            SSANC_REF(study.percentile_low)));
    f.push_back(DoubleField("study.percentile_high", "upper percentile",
                            SSANC_REF(study.percentile_high)));
    f.push_back(IntField("study.workers", "worker threads",
                         SSANC_REF(study.workers)));
    f.push_back(IntField("scene.num_outer_mics", "outer microphones K",
                         SSANC_REF(scene.num_outer_mics)));
    f.push_back(IntField("scene.sample_rate", "sample rate in Hz",
                         SSANC_REF(scene.sample_rate)));
    f.push_back(DoubleField("scene.duration_s", "scene length in seconds",
                            SSANC_REF(scene.duration_s)));
    f.push_back(DoubleField("scene.target_snr_db", "leakage SNR in dB",
                            SSANC_REF(scene.target_snr_db)));
    f.push_back(DoubleField("scene.speech_gain", "speech source gain",
                            SSANC_REF(scene.speech_gain)));
    f.push_back(DoubleField("scene.noise_gain", "noise source gain, 0 mutes",
                            SSANC_REF(scene.noise_gain)));
    f.push_back(DoubleField("scene.level", "overall scale",
                            SSANC_REF(scene.level)));
    f.push_back(DoubleField("scene.sensor_noise", "sensor noise std-dev",
                            SSANC_REF(scene.sensor_noise)));
    f.push_back(IntField("scene.ir_length", "acoustic impulse response taps",
                         SSANC_REF(scene.ir_length)));
    f.push_back(DoubleField("scene.leakage_extra_delay",
                            "extra leakage delay in samples",
                            SSANC_REF(scene.leakage_extra_delay)));
    f.push_back(IntField("ensemble.size", "number of secondary paths J",
                         SSANC_REF(ensemble_size)));
    f.push_back(DoubleField("ensemble.magnitude_db_std",
                            "per-band magnitude std-dev in dB",
                            SSANC_REF(variation.magnitude_db_std)));
    f.push_back(IntField("ensemble.n_bands", "perturbation bands",
                         SSANC_REF(variation.n_bands)));
    f.push_back(DoubleField("ensemble.phase_jitter_std",
                            "per-band phase std-dev in radians",
                            SSANC_REF(variation.phase_jitter_std)));
    f.push_back(IntField("ensemble.window_length",
                         "perturbation filter taps, 0: path_length / 4",
                         SSANC_REF(variation.window_length)));
    f.push_back(IntField("seed", "master seed", SSANC_REF(seed)));
    return f;
  }();
  return fields;
}

#undef SSANC_REF

const Field& FindField(const std::string& key) {
  for (const auto& f : Fields()) {
    if (f.name.key == key) return f;
  }
  throw ConfigError(fmt::format("unknown setting '{}'", key));
}

void Flatten(const YAML::Node& node, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string name = kv.first.as<std::string>();
      Flatten(kv.second, prefix.empty() ? name : prefix + "." + name, out);
    }
  } else if (node.IsSequence()) {
    std::string joined;
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (!node[i].IsScalar()) {
        throw ConfigError(fmt::format("{}: list items must be scalars", prefix));
      }
      joined += (i ? "," : "") + node[i].as<std::string>();
    }
    out.emplace_back(prefix, joined);
  } else if (node.IsScalar()) {
    out.emplace_back(prefix, node.as<std::string>());
  } else if (node.IsNull()) {
    throw ConfigError(fmt::format("{}: value is missing", prefix));
  }
}

}  // namespace

void Settings::Finalize() {
  if (!mu_list.empty()) {
    study.mu_grid = mu_list;
  } else {
    study.mu_grid = LogSpacedGrid(mu_min, mu_max, mu_points);
  }
  scene.path_length = study.design.path_length;
  scene.seed = seed;
  if (variation.window_length == 0) {
    variation.window_length = std::max(1, study.design.path_length / 4);
  }
  variation.seed = seed + 1;
  if (ensemble_size < 1) throw ConfigError("ensemble.size must be >= 1");
  try {
    scene.Validate();
    variation.Validate(study.design.path_length);
  } catch (const ConfigError&) {
    throw;
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  study.Validate();
}

Settings FullScaleDefaults() {
  Settings s;
  DesignParams& d = s.study.design;
  d.filter_length = 1800;
  d.path_length = 1800;
  d.reir_acausal_length = 4500;
  d.reir_causal_length = 4500;
  d.delay = 240;
  d.alpha = 2.0;
  d.rule = RegularizerRule{};
  s.study.loop.ff_latency = 2;
  s.study.loop.fb_latency = 3;
  s.mu_min = 1.0;
  s.mu_max = 3000.0;
  s.mu_points = 8;
  s.scene.num_outer_mics = 4;
  s.scene.sample_rate = 40000;
  s.scene.duration_s = 10.0;
  s.scene.target_snr_db = -7.0;
  s.scene.ir_length = 1000;
  s.scene.leakage_extra_delay = 20.0;
  s.ensemble_size = 44;
  s.variation = VariationSpec{};
  s.variation.magnitude_db_std = 3.0;
  s.variation.window_length = 0;
  return s;
}

Settings DeskScalePreset() {
  Settings s = FullScaleDefaults();
  DesignParams& d = s.study.design;
  d.filter_length = 64;
  d.path_length = 32;
  d.reir_acausal_length = 96;
  d.reir_causal_length = 96;
  d.delay = 8;
  s.mu_points = 6;
  s.scene = SceneSpec{};
  s.scene.sample_rate = 8000;
  s.scene.num_outer_mics = 2;
  s.scene.duration_s = 2.0;
  s.ensemble_size = 8;
  s.variation.magnitude_db_std = 1.5;
  return s;
}

const std::vector<SettingKey>& SettingKeys() {
  static const std::vector<SettingKey> keys = [] {
    std::vector<SettingKey> k;
    for (const auto& f : Fields()) k.push_back(f.name);
    return k;
  }();
  return keys;
}

void ApplySetting(Settings& s, const std::string& key,
                  const std::string& value) {
  FindField(key).set(s, value);
}

std::string GetSetting(const Settings& s, const std::string& key) {
  return FindField(key).get(s);
}

Settings ParseSettingsYaml(const std::string& text, Settings base) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  if (root.IsNull()) return base;
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  std::vector<std::pair<std::string, std::string>> leaves;
  Flatten(root, "", leaves);
  for (const auto& [key, value] : leaves) ApplySetting(base, key, value);
  return base;
}

Settings LoadSettingsFile(const std::string& path, Settings base) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("{}: cannot open config", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseSettingsYaml(ss.str(), std::move(base));
}

std::string SettingsToYaml(const Settings& s) {
  // Group the dotted keys by section while keeping registry order.
  std::vector<std::string> sections;
  std::map<std::string, std::vector<const Field*>> grouped;
  std::vector<const Field*> top;
  for (const auto& f : Fields()) {
    const auto dot = f.name.key.find('.');
    if (dot == std::string::npos) {
      top.push_back(&f);
      continue;
    }
    const std::string section = f.name.key.substr(0, dot);
    if (!grouped.count(section)) sections.push_back(section);
    grouped[section].push_back(&f);
  }
  std::string out;
  for (const auto& section : sections) {
    out += section + ":\n";
    for (const Field* f : grouped[section]) {
      const std::string leaf = f->name.key.substr(section.size() + 1);
      std::string value = f->get(s);
      const bool list = leaf == "cases" || leaf == "mu_list";
      if (list) value = "[" + value + "]";
      out += fmt::format("  {}: {}  # {}\n", leaf, value, f->name.help);
    }
  }
  for (const Field* f : top) {
    out += fmt::format("{}: {}  # {}\n", f->name.key, f->get(s), f->name.help);
  }
  return out;
}

}  // namespace ssanc

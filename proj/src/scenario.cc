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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "json.hpp"
#include "ssanc/errors.h"
#include "ssanc/metrics.h"
#include "ssanc/wav_io.h"

namespace ssanc {
namespace {

constexpr int kWarmup = 1000;
constexpr int kSincHalfWidth = 8;
constexpr int kReflections = 6;

// Per-source geometry: delay to outer mic 0, delay step per further mic,
// gain at mic 0, gain ratio per further mic, leakage delay and gain.
struct SourceGeometry {
  double delay;
  double delay_step;
  double gain;
  double gain_ratio;
  double leak_delay;
  double leak_gain;
};

constexpr SourceGeometry kSpeech{5.0, 0.4, 1.0, 0.9, 6.5, 1.0};
constexpr SourceGeometry kNoise1{3.0, 0.3, 1.0, 0.95, 7.2, 1.1};
constexpr SourceGeometry kNoise2{6.0, -0.8, 0.8, 1.125, 9.0, 1.0};

// The leakage path through the earpiece is mildly low-passed.
constexpr double kLeakLowpass[] = {0.8, 0.2};

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Hann-tapered windowed-sinc fractional delay added into h.
void AddFractionalDelay(std::vector<double>& h, double delay, double gain) {
  const int last = static_cast<int>(std::ceil(delay)) + kSincHalfWidth;
  for (int t = 0; t <= last && t < static_cast<int>(h.size()); ++t) {
    const double x = t - delay;
    if (std::abs(x) > kSincHalfWidth) continue;
    const double taper =
        0.5 * (1.0 + std::cos(std::numbers::pi * x / (kSincHalfWidth + 1)));
    h[t] += gain * Sinc(x) * taper;
  }
}

std::vector<double> SparseIr(double delay, double gain, int length,
                             bool leakage, std::mt19937_64& rng) {
  std::vector<double> h(length, 0.0);
  AddFractionalDelay(h, delay, gain);
  std::uniform_real_distribution<double> where(8.0, length - 20.0);
  std::uniform_real_distribution<double> amp(-0.3, 0.3);
  for (int r = 0; r < kReflections; ++r) {
    const double d = delay + where(rng);
    const double g = gain * amp(rng) * std::exp(-(d - delay) / 60.0);
    AddFractionalDelay(h, d, g);
  }
  if (leakage) h = Convolve(kLeakLowpass, h);
  return h;
}

std::vector<double> ColouredNoise(std::size_t n, std::span<const double> b,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> s(n + kWarmup);
  for (double& v : s) v = normal(rng);
  s = Convolve(b, s);
  return std::vector<double>(s.begin() + kWarmup, s.end());
}

std::vector<double> SpeechLike(std::size_t n, int fs, std::mt19937_64& rng) {
  static constexpr double kColour[] = {1.0, 0.6, 0.3};
  std::vector<double> s = ColouredNoise(n, kColour, rng);
  std::uniform_real_distribution<double> phase(0.0, 6.0);
  const double phi = phase(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + kWarmup) / fs;
    const double syl =
        std::max(0.0, std::sin(2.0 * std::numbers::pi * 3.0 * t + phi));
    const double env =
        syl * syl * (0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * 0.7 * t));
    s[i] *= 0.15 + env;
  }
  return s;
}

std::vector<double> Add(const std::vector<double>& a,
                        const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

void Scale(std::vector<double>& x, double c) {
  for (double& v : x) v *= c;
}

double Energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

void WriteManifest(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("{}: cannot open for writing", path));
  out << j.dump(2) << "\n";
}

}  // namespace

void SceneSpec::Validate() const {
  if (num_outer_mics < 1) {
    throw ConfigError("scene: num_outer_mics must be >= 1");
  }
  if (sample_rate <= 0) throw ConfigError("scene: sample_rate must be > 0");
  if (!(duration_s > 0.0)) throw ConfigError("scene: duration_s must be > 0");
  if (!std::isfinite(target_snr_db)) {
    throw ConfigError("scene: target_snr_db must be finite");
  }
  if (!(speech_gain >= 0.0) || !(noise_gain >= 0.0) || !(level > 0.0) ||
      !(sensor_noise >= 0.0)) {
    throw ConfigError(
        "scene: gains and sensor_noise must be >= 0 and level > 0");
  }
  if (ir_length < 64) throw ConfigError("scene: ir_length must be >= 64");
  if (!(leakage_extra_delay >= 0.0) ||
      kNoise2.leak_delay + leakage_extra_delay + kSincHalfWidth + 2 >
          ir_length) {
    throw ConfigError("scene: leakage_extra_delay does not fit ir_length");
  }
  if (path_length < 2) throw ConfigError("scene: path_length must be >= 2");
}

ImpulseResponse NominalSecondaryPath(int length, int sample_rate) {
  if (length < 2) {
    throw ArgumentError("NominalSecondaryPath: length must be >= 2");
  }
  std::vector<double> g(length, 0.0);
  for (int n = 1; n < length; ++n) {
    const int m = n - 1;
    g[n] = 0.8 * std::pow(0.82, m) *
           std::cos(2.0 * std::numbers::pi * 600.0 / sample_rate * m);
  }
  g[1] += 0.3;
  return ImpulseResponse(std::move(g), sample_rate);
}

SyntheticScenario GenerateSyntheticScenario(const SceneSpec& spec) {
  spec.Validate();
  const int k_mics = spec.num_outer_mics;
  const int fs = spec.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * fs));
  if (n < 16) throw ConfigError("scene: duration too short");

  std::mt19937_64 rng(spec.seed);
  std::vector<double> speech = SpeechLike(n, fs, rng);
  static constexpr double kColour1[] = {1.0, 0.9, 0.5, 0.2};
  static constexpr double kColour2[] = {1.0, -0.3, 0.2};
  std::vector<double> noise1 = ColouredNoise(n, kColour1, rng);
  std::vector<double> noise2 = ColouredNoise(n, kColour2, rng);
  Scale(speech, spec.speech_gain);
  Scale(noise1, spec.noise_gain);
  Scale(noise2, spec.noise_gain);

  // irs[source][mic], mic == k_mics is the leakage point.
  const SourceGeometry geoms[] = {kSpeech, kNoise1, kNoise2};
  std::vector<std::vector<std::vector<double>>> irs(3);
  for (int s = 0; s < 3; ++s) {
    const SourceGeometry& g = geoms[s];
    for (int m = 0; m <= k_mics; ++m) {
      const bool leak = m == k_mics;
      const double delay =
          leak ? g.leak_delay + spec.leakage_extra_delay
               : std::max(0.5, g.delay + g.delay_step * m);
      const double gain = leak ? g.leak_gain : g.gain * std::pow(g.gain_ratio, m);
      irs[s].push_back(SparseIr(delay, gain, spec.ir_length, leak, rng));
    }
  }

  std::vector<std::vector<double>> outer_s(k_mics);
  std::vector<std::vector<double>> outer_v(k_mics);
  for (int m = 0; m < k_mics; ++m) {
    outer_s[m] = Convolve(irs[0][m], speech);
    outer_v[m] = Add(Convolve(irs[1][m], noise1), Convolve(irs[2][m], noise2));
  }
  std::vector<double> p_s = Convolve(irs[0][k_mics], speech);
  std::vector<double> p_v =
      Add(Convolve(irs[1][k_mics], noise1), Convolve(irs[2][k_mics], noise2));

  std::normal_distribution<double> normal(0.0, 1.0);
  const double sensor = spec.sensor_noise * spec.noise_gain;
  for (int m = 0; m < k_mics; ++m) {
    for (double& v : outer_v[m]) v += sensor * normal(rng);
  }
  for (double& v : p_v) v += sensor * normal(rng);

  const double speech_energy = Energy(p_s);
  if (!(speech_energy > 0.0)) {
    throw ConfigError(
        "scene: infeasible SNR scaling, the speech leakage has zero energy");
  }
  if (spec.noise_gain > 0.0) {
    const double snr = 10.0 * std::log10(speech_energy / Energy(p_v));
    const double c = std::pow(10.0, (snr - spec.target_snr_db) / 20.0);
    Scale(p_v, c);
    for (auto& o : outer_v) Scale(o, c);
  }
  Scale(p_s, spec.level);
  Scale(p_v, spec.level);
  std::vector<std::vector<double>> outer(k_mics);
  for (int m = 0; m < k_mics; ++m) {
    Scale(outer_s[m], spec.level);
    Scale(outer_v[m], spec.level);
    outer[m] = Add(outer_s[m], outer_v[m]);
  }

  std::vector<ImpulseResponse> speech_irs;
  for (int m = 0; m <= k_mics; ++m) speech_irs.emplace_back(irs[0][m], fs);

  SyntheticScenario scenario{
      ScenarioSignals{MultichannelSignal(std::move(outer), fs), std::move(p_s),
                      std::move(p_v),
                      MultichannelSignal(std::move(outer_s), fs)},
      std::move(speech_irs), 0, NominalSecondaryPath(spec.path_length, fs)};
  scenario.signals.Validate();
  return scenario;
}

void SaveScenario(const SyntheticScenario& scenario, const std::string& dir,
                  const std::string& ensemble_dir) {
  const ScenarioSignals& s = scenario.signals;
  s.Validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("{}: cannot create directory: {}", dir,
                              ec.message()));
  }
  const std::filesystem::path root(dir);
  const int k = s.num_outer();

  std::vector<std::vector<double>> channels;
  nlohmann::ordered_json roles = nlohmann::ordered_json::array();
  for (int m = 0; m < k; ++m) {
    channels.push_back(s.outer_mics.channels()[m]);
    roles.push_back({{"channel", channels.size() - 1},
                     {"role", "outer_mic"},
                     {"mic", m}});
  }
  channels.push_back(s.leakage_speech);
  roles.push_back({{"channel", channels.size() - 1}, {"role", "leakage_speech"}});
  channels.push_back(s.leakage_noise);
  roles.push_back({{"channel", channels.size() - 1}, {"role", "leakage_noise"}});
  for (int m = 0; m < k; ++m) {
    channels.push_back(s.outer_speech.channels()[m]);
    roles.push_back({{"channel", channels.size() - 1},
                     {"role", "outer_speech"},
                     {"mic", m}});
  }
  WriteMultichannelWav(MultichannelSignal(std::move(channels), s.sample_rate()),
                       (root / "scenario.wav").string());

  std::vector<std::vector<double>> irs;
  std::size_t ir_len = 0;
  for (const auto& h : scenario.speech_irs) ir_len = std::max(ir_len, h.size());
  for (const auto& h : scenario.speech_irs) {
    std::vector<double> padded = h.coefficients();
    padded.resize(ir_len, 0.0);
    irs.push_back(std::move(padded));
  }
  WriteMultichannelWav(MultichannelSignal(std::move(irs), s.sample_rate()),
                       (root / "speech_irs.wav").string());
  WriteMultichannelWav(
      MultichannelSignal({scenario.secondary_path.coefficients()},
                         s.sample_rate()),
      (root / "secondary_path.wav").string());

  nlohmann::ordered_json j;
  j["format"] = "ssanc-scenario";
  j["version"] = 1;
  j["sample_rate"] = s.sample_rate();
  j["num_samples"] = s.num_samples();
  j["num_outer"] = k;
  j["reference_mic"] = scenario.reference_mic;
  j["signals_file"] = "scenario.wav";
  j["channels"] = roles;
  j["speech_irs_file"] = "speech_irs.wav";
  j["speech_irs_roles"] = "outer mics in order, then the leakage point";
  j["secondary_path_file"] = "secondary_path.wav";
  bool silent_noise = true;
  for (double v : s.leakage_noise) silent_noise = silent_noise && v == 0.0;
  if (silent_noise) {
    j["leakage_snr_db"] = nullptr;
  } else {
    j["leakage_snr_db"] = SnrDb(s.leakage_speech, s.leakage_noise);
  }
  if (!ensemble_dir.empty()) j["ensemble_dir"] = ensemble_dir;
  WriteManifest(j, (root / "scenario.json").string());
}

LoadedScenario LoadScenario(const std::string& dir) {
  const std::filesystem::path root(dir);
  const std::string path = (root / "scenario.json").string();
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("{}: cannot open manifest", path));
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    const int k = j.at("num_outer").get<int>();
    const MultichannelSignal all = ReadMultichannelWav(
        (root / j.at("signals_file").get<std::string>()).string());
    const int fs = all.sample_rate();
    if (fs != j.at("sample_rate").get<int>()) {
      throw IoError(fmt::format("{}: 'sample_rate' disagrees with the WAV",
                                path));
    }
    std::vector<std::vector<double>> outer(k);
    std::vector<std::vector<double>> outer_speech(k);
    std::vector<double> p_s;
    std::vector<double> p_v;
    int found = 0;
    for (const auto& r : j.at("channels")) {
      const int ch = r.at("channel").get<int>();
      if (ch < 0 || ch >= all.num_channels()) {
        throw IoError(fmt::format("{}: channel {} not in {}", path, ch,
                                  j.at("signals_file").get<std::string>()));
      }
      const std::string role = r.at("role").get<std::string>();
      const auto& data = all.channels()[ch];
      auto mic = [&]() {
        const int m = r.at("mic").get<int>();
        if (m < 0 || m >= k) {
          throw IoError(fmt::format("{}: mic index {} out of range", path, m));
        }
        return m;
      };
      if (role == "outer_mic") {
        outer[mic()] = data;
      } else if (role == "outer_speech") {
        outer_speech[mic()] = data;
      } else if (role == "leakage_speech") {
        p_s = data;
      } else if (role == "leakage_noise") {
        p_v = data;
      } else {
        throw IoError(fmt::format("{}: unknown channel role '{}'", path, role));
      }
      ++found;
    }
    if (found != 2 * k + 2 || p_s.empty() || p_v.empty()) {
      throw IoError(fmt::format("{}: 'channels' must map {} roles", path,
                                2 * k + 2));
    }
    for (int m = 0; m < k; ++m) {
      if (outer[m].empty() || outer_speech[m].empty()) {
        throw IoError(fmt::format("{}: mic {} lacks a mixture or speech role",
                                  path, m));
      }
    }

    const MultichannelSignal irs = ReadMultichannelWav(
        (root / j.at("speech_irs_file").get<std::string>()).string());
    if (irs.num_channels() != k + 1) {
      throw IoError(fmt::format("{}: speech_irs needs {} channels, found {}",
                                path, k + 1, irs.num_channels()));
    }
    std::vector<ImpulseResponse> speech_irs;
    for (const auto& c : irs.channels()) speech_irs.emplace_back(c, fs);
    const MultichannelSignal g = ReadMultichannelWav(
        (root / j.at("secondary_path_file").get<std::string>()).string());

    LoadedScenario out{
        SyntheticScenario{
            ScenarioSignals{MultichannelSignal(std::move(outer), fs),
                            std::move(p_s), std::move(p_v),
                            MultichannelSignal(std::move(outer_speech), fs)},
            std::move(speech_irs), j.at("reference_mic").get<int>(),
            ImpulseResponse(g.channels().front(), fs)},
        ""};
    if (j.contains("ensemble_dir")) {
      out.ensemble_dir =
          (root / j.at("ensemble_dir").get<std::string>()).string();
    }
    out.scenario.signals.Validate();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(fmt::format("{}: malformed manifest: {}", path, e.what()));
  } catch (const ArgumentError& e) {
    throw IoError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace ssanc

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

#include "ssanc/closed_loop_sim.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ssanc/errors.h"

namespace ssanc {

void LoopConfig::Validate() const {
  if (ff_latency < 0) {
    throw ConfigError("LoopConfig: ff_latency must be >= 0");
  }
  if (fb_latency < 1) {
    throw ConfigError(
        "LoopConfig: fb_latency must be >= 1; a zero-delay feedback path is "
        "an algebraic loop");
  }
  if (instability_threshold && !(*instability_threshold > 0.0)) {
    throw ConfigError("LoopConfig: instability_threshold must be > 0");
  }
  if (!(instability_factor > 0.0)) {
    throw ConfigError("LoopConfig: instability_factor must be > 0");
  }
}

std::vector<double> ScenarioSignals::Leakage() const {
  std::vector<double> p(leakage_speech.size());
  for (std::size_t n = 0; n < p.size(); ++n) {
    p[n] = leakage_speech[n] + leakage_noise[n];
  }
  return p;
}

MultichannelSignal ScenarioSignals::OuterNoise() const {
  std::vector<std::vector<double>> noise = outer_mics.channels();
  for (int k = 0; k < num_outer(); ++k) {
    for (std::size_t n = 0; n < noise[k].size(); ++n) {
      noise[k][n] -= outer_speech.channels()[k][n];
    }
  }
  return MultichannelSignal(std::move(noise), sample_rate());
}

void ScenarioSignals::Validate() const {
  const std::size_t n = num_samples();
  if (leakage_speech.size() != n || leakage_noise.size() != n ||
      outer_speech.num_samples() != n) {
    throw ArgumentError("ScenarioSignals: all sequences must share length N");
  }
  if (outer_speech.num_channels() != num_outer()) {
    throw ArgumentError(
        "ScenarioSignals: outer_speech must have one channel per outer mic");
  }
  if (outer_speech.sample_rate() != sample_rate()) {
    throw ArgumentError("ScenarioSignals: sample rates differ");
  }
}

LoopOutput SimulateLoop(const StackedControlFilter& w,
                        const ImpulseResponse& g_true,
                        const ImpulseResponse& g_hat,
                        const MultichannelSignal& outer,
                        std::span<const double> leakage,
                        const LoopConfig& cfg) {
  cfg.Validate();
  if (w.num_outer() != outer.num_channels()) {
    throw ArgumentError(fmt::format(
        "SimulateLoop: filter has {} feedforward blocks for {} outer mics",
        w.num_outer(), outer.num_channels()));
  }
  if (leakage.size() != outer.num_samples()) {
    throw ArgumentError("SimulateLoop: leakage and outer mics differ in length");
  }
  std::size_t n_total = outer.num_samples();
  if (cfg.max_samples > 0) n_total = std::min(n_total, cfg.max_samples);

  double threshold = 0.0;
  if (cfg.instability_threshold) {
    threshold = *cfg.instability_threshold;
  } else {
    double peak = outer.Peak();
    for (std::size_t n = 0; n < n_total; ++n) {
      peak = std::max(peak, std::abs(leakage[n]));
    }
    threshold = cfg.instability_factor * (peak > 0.0 ? peak : 1.0);
  }

  // The feedforward branch is open loop and is filtered up front.
  std::vector<double> ff(n_total, 0.0);
  for (int k = 0; k < w.num_outer(); ++k) {
    const std::vector<double> part =
        Convolve(w.block(k), outer.channel(k).first(n_total));
    for (std::size_t n = 0; n < n_total; ++n) ff[n] += part[n];
  }

  const auto w_fb = w.block(w.num_outer());
  const auto& gt = g_true.coefficients();
  const auto& gh = g_hat.coefficients();
  const long lw = static_cast<long>(w_fb.size());
  const long ff_lat = cfg.ff_latency;
  const long fb_lat = cfg.fb_latency;

  LoopOutput out;
  out.error.assign(n_total, 0.0);
  out.loudspeaker.assign(n_total, 0.0);
  out.leakage_estimate.assign(n_total, 0.0);
  auto& e = out.error;
  auto& y = out.loudspeaker;
  auto& p_hat = out.leakage_estimate;

  for (long n = 0; n < static_cast<long>(n_total); ++n) {
    double acc = n >= ff_lat ? ff[n - ff_lat] : 0.0;
    const long newest = n - fb_lat;
    const long taps = std::min(lw, newest + 1);
    for (long i = 0; i < taps; ++i) acc += w_fb[i] * p_hat[newest - i];
    y[n] = acc;

    double true_out = 0.0;
    const long gt_taps = std::min<long>(gt.size(), n + 1);
    for (long i = 0; i < gt_taps; ++i) true_out += gt[i] * y[n - i];
    double est_out = 0.0;
    const long gh_taps = std::min<long>(gh.size(), n + 1);
    for (long i = 0; i < gh_taps; ++i) est_out += gh[i] * y[n - i];

    e[n] = leakage[n] + true_out;
    p_hat[n] = e[n] - est_out;

    if (!(std::abs(e[n]) <= threshold) || !(std::abs(y[n]) <= threshold)) {
      out.stable = false;
      out.divergence_sample = static_cast<std::size_t>(n);
      e.resize(n);
      y.resize(n);
      p_hat.resize(n);
      break;
    }
  }
  return out;
}

ComponentOutput SimulateComponents(const StackedControlFilter& w,
                                   const ImpulseResponse& g_true,
                                   const ImpulseResponse& g_hat,
                                   const ScenarioSignals& signals,
                                   const LoopConfig& cfg) {
  signals.Validate();
  LoopOutput speech = SimulateLoop(w, g_true, g_hat, signals.outer_speech,
                                   signals.leakage_speech, cfg);
  LoopOutput noise = SimulateLoop(w, g_true, g_hat, signals.OuterNoise(),
                                  signals.leakage_noise, cfg);
  ComponentOutput out;
  out.stable = speech.stable && noise.stable;
  out.e_s = std::move(speech.error);
  out.e_v = std::move(noise.error);
  const std::size_t n = std::min(out.e_s.size(), out.e_v.size());
  out.e.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.e[i] = out.e_s[i] + out.e_v[i];
  return out;
}

}  // namespace ssanc

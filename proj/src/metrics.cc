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

#include "ssanc/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "band_table_data.h"
#include "ssanc/dsp_core.h"
#include "ssanc/errors.h"

namespace ssanc {
namespace {

double Energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void BandAnalysis::Validate() const {
  if (center_frequencies.empty() ||
      center_frequencies.size() != importance_weights.size()) {
    throw ArgumentError(
        "BandAnalysis: need one importance weight per band centre");
  }
  double sum = 0.0;
  for (std::size_t b = 0; b < center_frequencies.size(); ++b) {
    if (importance_weights[b] < 0.0) {
      throw ArgumentError("BandAnalysis: weights must be >= 0");
    }
    if (!(center_frequencies[b] > 0.0) ||
        (b > 0 && center_frequencies[b] <= center_frequencies[b - 1])) {
      throw ArgumentError(
          "BandAnalysis: centre frequencies must be positive and strictly "
          "increasing");
    }
    sum += importance_weights[b];
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw ArgumentError(fmt::format(
        "BandAnalysis: weights sum to {}, expected 1", sum));
  }
  if (welch_segment < 0) {
    throw ArgumentError("BandAnalysis: welch_segment must be >= 0");
  }
}

BandAnalysis ParseBandTable(const std::string& csv_text) {
  BandAnalysis bands;
  std::istringstream in(csv_text);
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# version:";
      if (line.rfind(key, 0) == 0) {
        bands.table_version = Trim(line.substr(key.size()));
      }
      continue;
    }
    if (!header_seen) {
      if (line != "center_hz,importance") {
        throw ConfigError(fmt::format(
            "band table line {}: expected header 'center_hz,importance'",
            line_no));
      }
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(fmt::format("band table line {}: missing ','",
                                    line_no));
    }
    try {
      bands.center_frequencies.push_back(std::stod(line.substr(0, comma)));
      bands.importance_weights.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("band table line {}: not a number pair",
                                    line_no));
    }
  }
  if (bands.center_frequencies.empty()) {
    throw ConfigError("band table: no bands");
  }
  double sum = 0.0;
  for (double w : bands.importance_weights) sum += w;
  if (!(sum > 0.0)) throw ConfigError("band table: weights sum to zero");
  for (double& w : bands.importance_weights) w /= sum;
  bands.Validate();
  return bands;
}

BandAnalysis LoadBandTable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("{}: cannot open band table", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseBandTable(ss.str());
}

BandAnalysis DefaultBandAnalysis() {
  return ParseBandTable(internal::kBandTableCsv);
}

double NoiseReductionDb(std::span<const double> p_v,
                        std::span<const double> e_v) {
  if (p_v.size() != e_v.size()) {
    throw ArgumentError(fmt::format(
        "NoiseReductionDb: p_v has {} samples, e_v has {}", p_v.size(),
        e_v.size()));
  }
  const double pe = Energy(p_v);
  if (pe == 0.0) {
    throw MetricError("NoiseReductionDb: p_v has zero energy");
  }
  const double ee = Energy(e_v);
  if (ee == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(pe) - 10.0 * std::log10(ee);
}

double SnrDb(std::span<const double> speech, std::span<const double> noise) {
  if (speech.size() != noise.size()) {
    throw ArgumentError("SnrDb: speech and noise differ in length");
  }
  const double ne = Energy(noise);
  if (ne == 0.0) throw MetricError("SnrDb: noise has zero energy");
  return 10.0 * std::log10(Energy(speech) / ne);
}

int DefaultWelchSegment(int sample_rate) {
  if (sample_rate <= 0) {
    throw ArgumentError("DefaultWelchSegment: sample_rate must be positive");
  }
  const double target = sample_rate / 8.0;
  int lo = 1;
  while (lo * 2 <= target) lo *= 2;
  const int hi = lo * 2;
  return (target - lo <= hi - target) ? lo : hi;
}

WelchPsd EstimateWelchPsd(std::span<const double> x, int sample_rate,
                          int segment_length) {
  if (x.size() < 2) {
    throw ArgumentError("EstimateWelchPsd: need at least 2 samples");
  }
  int seg = segment_length > 0 ? segment_length
                               : DefaultWelchSegment(sample_rate);
  if (seg > static_cast<int>(x.size())) {
    seg = 1;
    while (seg * 2 <= static_cast<int>(x.size())) seg *= 2;
  }
  std::vector<double> window(seg);
  double window_power = 0.0;
  for (int i = 0; i < seg; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / seg);
    window_power += window[i] * window[i];
  }
  const int bins = seg / 2 + 1;
  WelchPsd out;
  out.segment_length = seg;
  out.psd.assign(bins, 0.0);
  out.frequencies.resize(bins);
  for (int k = 0; k < bins; ++k) {
    out.frequencies[k] = static_cast<double>(k) * sample_rate / seg;
  }
  const int step = std::max(1, seg / 2);
  int count = 0;
  std::vector<double> frame(seg);
  for (std::size_t start = 0; start + seg <= x.size(); start += step) {
    for (int i = 0; i < seg; ++i) frame[i] = x[start + i] * window[i];
    const auto spec = RealFftForward(frame, seg);
    for (int k = 0; k < bins; ++k) out.psd[k] += std::norm(spec[k]);
    ++count;
  }
  const double scale = 1.0 / (count * sample_rate * window_power);
  for (int k = 0; k < bins; ++k) {
    const bool edge = (k == 0) || (seg % 2 == 0 && k == bins - 1);
    out.psd[k] *= scale * (edge ? 1.0 : 2.0);
  }
  return out;
}

SdBreakdown SdIntelligBreakdown(std::span<const double> e_s,
                                std::span<const double> x_ref_s, double alpha,
                                int delay, const BandAnalysis& bands,
                                int sample_rate) {
  bands.Validate();
  if (e_s.size() != x_ref_s.size()) {
    throw ArgumentError("SdIntelligDb: e_s and x_ref_s differ in length");
  }
  if (!(alpha > 0.0)) throw ArgumentError("SdIntelligDb: alpha must be > 0");
  if (delay < 0 || static_cast<std::size_t>(delay) >= e_s.size()) {
    throw ArgumentError("SdIntelligDb: sequences do not cover the delay");
  }
  const std::size_t n = e_s.size();
  std::vector<double> ref(n, 0.0);
  std::vector<double> eps(n);
  for (std::size_t t = delay; t < n; ++t) ref[t] = alpha * x_ref_s[t - delay];
  for (std::size_t t = 0; t < n; ++t) eps[t] = e_s[t] - ref[t];

  const int seg = bands.welch_segment;
  const WelchPsd p_ref = EstimateWelchPsd(ref, sample_rate, seg);
  const WelchPsd p_eps = EstimateWelchPsd(eps, sample_rate, seg);

  const std::size_t nb = bands.center_frequencies.size();
  std::vector<double> band_ref(nb, 0.0);
  std::vector<double> band_eps(nb, 0.0);
  std::vector<int> band_bins(nb, 0);
  std::vector<bool> usable(nb, false);
  const double edge = std::pow(2.0, 1.0 / 6.0);
  double max_ref = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double lo = bands.center_frequencies[b] / edge;
    const double hi = bands.center_frequencies[b] * edge;
    for (std::size_t k = 0; k < p_ref.frequencies.size(); ++k) {
      const double f = p_ref.frequencies[k];
      if (f >= lo && f < hi) {
        band_ref[b] += p_ref.psd[k];
        band_eps[b] += p_eps.psd[k];
        ++band_bins[b];
      }
    }
    usable[b] = hi <= 0.5 * sample_rate && band_bins[b] > 0;
    if (usable[b]) max_ref = std::max(max_ref, band_ref[b]);
  }

  SdBreakdown out;
  out.band_db.assign(nb, 0.0);
  out.included.assign(nb, false);
  out.weights_used.assign(nb, 0.0);
  double weight_sum = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    out.included[b] = usable[b] && band_ref[b] > 1e-10 * max_ref &&
                      band_ref[b] > 0.0;
    if (out.included[b]) weight_sum += bands.importance_weights[b];
  }
  if (!(weight_sum > 0.0)) {
    throw MetricError(
        "SdIntelligDb: no band has reference power above the floor");
  }
  for (std::size_t b = 0; b < nb; ++b) {
    if (!out.included[b]) continue;
    const double ratio = band_eps[b] / band_ref[b];
    out.band_db[b] = ratio > 0.0
                         ? std::max(10.0 * std::log10(ratio), kBandFloorDb)
                         : kBandFloorDb;
    out.weights_used[b] = bands.importance_weights[b] / weight_sum;
    out.sd_db += out.weights_used[b] * out.band_db[b];
  }
  return out;
}

double SdIntelligDb(std::span<const double> e_s,
                    std::span<const double> x_ref_s, double alpha, int delay,
                    const BandAnalysis& bands, int sample_rate) {
  return SdIntelligBreakdown(e_s, x_ref_s, alpha, delay, bands, sample_rate)
      .sd_db;
}

}  // namespace ssanc

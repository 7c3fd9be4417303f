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

// Noise reduction, intelligibility-weighted spectral distortion and SNR.
// PESQ and ESTOI are not computed; CaseReport keeps empty columns for them.

#ifndef SSANC_METRICS_H_
#define SSANC_METRICS_H_

#include <span>
#include <string>
#include <vector>

namespace ssanc {

// One-third-octave band set with importance weights (sum 1).
struct BandAnalysis {
  std::vector<double> center_frequencies;
  std::vector<double> importance_weights;
  std::string table_version;
  // Welch segment length in samples; 0 picks sample_rate / 8 rounded to
  // the nearest power of two.
  int welch_segment = 0;

  void Validate() const;
};

// Parses "center_hz,importance" rows; '#' lines are comments and a
// "# version: <id>" comment names the table. Weights are renormalized.
BandAnalysis ParseBandTable(const std::string& csv_text);
BandAnalysis LoadBandTable(const std::string& path);
// The built-in 18-band table (160 Hz ... 8 kHz).
BandAnalysis DefaultBandAnalysis();

// +infinity when e_v has zero energy. MetricError when p_v has none.
double NoiseReductionDb(std::span<const double> p_v,
                        std::span<const double> e_v);

double SnrDb(std::span<const double> speech, std::span<const double> noise);

// Floor applied to each band term (and used when the error power is zero).
inline constexpr double kBandFloorDb = -100.0;

struct SdBreakdown {
  double sd_db = 0.0;
  std::vector<double> band_db;        // 10 log10(P_eps / P_ref), floored
  std::vector<bool> included;         // band passed the inclusion rules
  std::vector<double> weights_used;   // renormalized, 0 when excluded
};

// eps(n) = e_s(n) - alpha x_ref_s(n - delay) compared band-wise with the
// reference alpha x_ref_s(n - delay). A band is used when its upper edge
// lies below Nyquist, it holds at least one FFT bin and its reference power
// exceeds 1e-10 of the strongest band.
SdBreakdown SdIntelligBreakdown(std::span<const double> e_s,
                                std::span<const double> x_ref_s, double alpha,
                                int delay, const BandAnalysis& bands,
                                int sample_rate);
double SdIntelligDb(std::span<const double> e_s,
                    std::span<const double> x_ref_s, double alpha, int delay,
                    const BandAnalysis& bands, int sample_rate);

struct WelchPsd {
  std::vector<double> frequencies;
  std::vector<double> psd;  // one-sided, power per Hz
  int segment_length = 0;
};

// Periodic Hann window, 50% overlap. segment_length 0 chooses the default,
// shrunk to the largest power of two not exceeding the signal length.
WelchPsd EstimateWelchPsd(std::span<const double> x, int sample_rate,
                          int segment_length = 0);
int DefaultWelchSegment(int sample_rate);

}  // namespace ssanc

#endif  // SSANC_METRICS_H_

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

#include "ssanc/path_model.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "json.hpp"
#include "ssanc/errors.h"
#include "ssanc/wav_io.h"

namespace ssanc {
namespace {

using Complex = std::complex<double>;

// Linear interpolation of `values` given at ascending `knots`, held flat
// outside the knot range.
double InterpolateFlat(const std::vector<double>& knots,
                       const std::vector<double>& values, double x) {
  if (x <= knots.front()) return values.front();
  if (x >= knots.back()) return values.back();
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const std::size_t hi = it - knots.begin();
  const std::size_t lo = hi - 1;
  const double t = (x - knots[lo]) / (knots[hi] - knots[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

ImpulseResponse ReadSingleChannel(const std::string& path) {
  const MultichannelSignal s = ReadMultichannelWav(path);
  if (s.num_channels() != 1) {
    throw IoError(fmt::format("{}: expected 1 channel, found {}", path,
                              s.num_channels()));
  }
  return ImpulseResponse(s.channels().front(), s.sample_rate());
}

void WriteSingleChannel(const ImpulseResponse& h, const std::string& path) {
  WriteMultichannelWav(MultichannelSignal({h.coefficients()}, h.sample_rate()),
                       path, WavFormat::kFloat32);
}

}  // namespace

FirEstimate IdentifyFirLs(std::span<const double> excitation,
                          std::span<const double> response, int order,
                          int sample_rate) {
  if (order < 1) throw ArgumentError("IdentifyFirLs: order must be >= 1");
  if (excitation.size() != response.size()) {
    throw ArgumentError(fmt::format(
        "IdentifyFirLs: excitation has {} samples, response has {}",
        excitation.size(), response.size()));
  }
  const std::size_t n = excitation.size();
  if (n < 4 * static_cast<std::size_t>(order)) {
    throw ArgumentError(fmt::format(
        "IdentifyFirLs: need at least {} samples for order {}, got {}",
        4 * order, order, n));
  }
  double energy = 0.0;
  for (double v : excitation) energy += v * v;
  if (energy == 0.0) {
    throw IdentificationError(
        "IdentifyFirLs: excitation has zero energy; use a white-noise "
        "excitation");
  }

  // R(i, j) = sum_{t >= max(i, j)} x[t - i] x[t - j], built from its first
  // row by the recursion R(i+1, j+1) = R(i, j) - x[n-1-i] x[n-1-j].
  Matrix r(order, order);
  Vector b(order);
  for (int j = 0; j < order; ++j) {
    double acc = 0.0;
    double acc_b = 0.0;
    for (std::size_t t = j; t < n; ++t) {
      acc += excitation[t] * excitation[t - j];
      acc_b += response[t] * excitation[t - j];
    }
    r(0, j) = acc;
    r(j, 0) = acc;
    b[j] = acc_b;
  }
  for (int i = 0; i + 1 < order; ++i) {
    for (int j = i; j + 1 < order; ++j) {
      const double v =
          r(i, j) - excitation[n - 1 - i] * excitation[n - 1 - j];
      r(i + 1, j + 1) = v;
      r(j + 1, i + 1) = v;
    }
  }

  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
    throw IdentificationError(fmt::format(
        "IdentifyFirLs: excitation autocorrelation is rank deficient for "
        "order {}; use a longer or whiter excitation",
        order));
  }
  const Vector h = llt.solve(b);
  std::vector<double> taps(h.data(), h.data() + h.size());
  const std::vector<double> fitted = Convolve(taps, excitation);
  double residual = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double d = response[t] - fitted[t];
    residual += d * d;
  }
  return {ImpulseResponse(std::move(taps), sample_rate), residual};
}

std::vector<AcausalKernel> IdentifyReirSet(
    const std::vector<ImpulseResponse>& ir_to_mics, int reference_index,
    int acausal_length, int causal_length) {
  if (ir_to_mics.empty()) {
    throw ArgumentError("IdentifyReirSet: no impulse responses given");
  }
  if (reference_index < 0 ||
      reference_index >= static_cast<int>(ir_to_mics.size())) {
    throw ArgumentError(fmt::format(
        "IdentifyReirSet: reference_index {} out of range [0, {})",
        reference_index, ir_to_mics.size()));
  }
  if (acausal_length < 0 || causal_length < 1) {
    throw ArgumentError(
        "IdentifyReirSet: need acausal_length >= 0 and causal_length >= 1");
  }
  const int fs = ir_to_mics.front().sample_rate();
  double max_energy = 0.0;
  for (const auto& h : ir_to_mics) {
    if (h.sample_rate() != fs) {
      throw ArgumentError("IdentifyReirSet: sample rates differ");
    }
    max_energy = std::max(max_energy, h.Energy());
  }
  const ImpulseResponse& ref = ir_to_mics[reference_index];
  if (ref.Energy() <= 1e-12 * max_energy || ref.Energy() == 0.0) {
    throw IdentificationError(
        "IdentifyReirSet: reference impulse response has near-zero energy");
  }

  // White-noise normal equations: sum_l h_l r_ref(m - l) = c(m), where
  // r_ref is the reference autocorrelation and c(m) = sum_t ref[t] a[t + m].
  const int n = acausal_length + causal_length;
  const std::vector<double> auto_corr = CrossCorrelate(ref.taps(), ref.taps());
  const int zero = static_cast<int>(ref.size()) - 1;
  auto r_ref = [&](int m) {
    const int idx = zero + m;
    if (idx < 0 || idx >= static_cast<int>(auto_corr.size())) return 0.0;
    return auto_corr[idx];
  };
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = r_ref(i - j);
  }
  a.diagonal().array() += 1e-8 * a.trace() / n;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw IdentificationError(
        "IdentifyReirSet: reference autocorrelation is not positive definite");
  }

  std::vector<AcausalKernel> out;
  out.reserve(ir_to_mics.size());
  for (const auto& mic : ir_to_mics) {
    const std::vector<double> cross = CrossCorrelate(ref.taps(), mic.taps());
    Vector c(n);
    for (int i = 0; i < n; ++i) {
      const int idx = zero + (i - acausal_length);
      c[i] = (idx >= 0 && idx < static_cast<int>(cross.size())) ? cross[idx]
                                                               : 0.0;
    }
    const Vector h = llt.solve(c);
    out.push_back({std::vector<double>(h.data(), h.data() + n),
                   acausal_length});
  }
  return out;
}

void VariationSpec::Validate(int path_length) const {
  if (!(magnitude_db_std >= 0.0) || !(phase_jitter_std >= 0.0)) {
    throw ArgumentError("VariationSpec: standard deviations must be >= 0");
  }
  if (n_bands < 1) throw ArgumentError("VariationSpec: n_bands must be >= 1");
  if (window_length < 1 || window_length > path_length) {
    throw ArgumentError(fmt::format(
        "VariationSpec: window_length {} must lie in [1, {}]", window_length,
        path_length));
  }
}

VariationSpec DefaultVariationSpec(int path_length, std::uint64_t seed) {
  VariationSpec spec;
  spec.window_length = std::max(1, path_length / 4);
  spec.seed = seed;
  return spec;
}

std::vector<double> PerturbationBandCenters(const VariationSpec& spec,
                                            int sample_rate) {
  const double f_hi = 0.45 * sample_rate;
  if (spec.n_bands == 1) return {f_hi};
  // The lowest band sits where a window_length filter can still resolve it.
  const double f_lo = std::min(
      std::max(f_hi / std::pow(2.0, (spec.n_bands - 1) / 3.0),
               4.0 * sample_rate / spec.window_length),
      f_hi / 2.0);
  std::vector<double> centers(spec.n_bands);
  const double ratio = std::log(f_hi / f_lo) / (spec.n_bands - 1);
  for (int b = 0; b < spec.n_bands; ++b) {
    centers[b] = f_lo * std::exp(ratio * b);
  }
  centers.back() = f_hi;
  return centers;
}

std::vector<double> PerturbationFilter(const VariationSpec& spec, int index,
                                       int sample_rate) {
  const int w = spec.window_length;
  if (w < 1) throw ArgumentError("PerturbationFilter: window_length < 1");
  const int nfft = std::max(1024, NextPowerOfTwo(8 * w));
  const int n_bins = nfft / 2 + 1;

  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed & 0xFFFFFFFFu),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> mag_db(spec.n_bands);
  std::vector<double> phase(spec.n_bands);
  for (double& v : mag_db) v = spec.magnitude_db_std * normal(rng);
  for (double& v : phase) v = spec.phase_jitter_std * normal(rng);

  const std::vector<double> centers =
      PerturbationBandCenters(spec, sample_rate);
  std::vector<double> log_centers(centers.size());
  std::transform(centers.begin(), centers.end(), log_centers.begin(),
                 [](double f) { return std::log(f); });

  std::vector<Complex> log_mag(n_bins);
  std::vector<double> phase_bins(n_bins, 0.0);
  for (int k = 0; k < n_bins; ++k) {
    const double f = static_cast<double>(k) * sample_rate / nfft;
    const double lf = std::log(std::max(f, 1e-9));
    log_mag[k] = InterpolateFlat(log_centers, mag_db, lf) / 20.0 *
                 std::numbers::ln10;
    if (k > 0 && k < n_bins - 1) {
      phase_bins[k] = InterpolateFlat(log_centers, phase, lf);
    }
  }

  // Minimum phase by folding the real cepstrum onto positive quefrencies.
  std::vector<double> cep = RealFftInverse(log_mag, nfft);
  std::vector<double> folded(nfft, 0.0);
  folded[0] = cep[0];
  for (int i = 1; i < nfft / 2; ++i) folded[i] = 2.0 * cep[i];
  folded[nfft / 2] = cep[nfft / 2];
  std::vector<Complex> spectrum = RealFftForward(folded, nfft);
  for (int k = 0; k < n_bins; ++k) {
    spectrum[k] = std::exp(spectrum[k]) * std::polar(1.0, phase_bins[k]);
  }
  std::vector<double> v = RealFftInverse(spectrum, nfft);
  v.resize(w);

  // Flat first half, half-Hann fade over the second.
  const int half = w / 2;
  const int fade = w - half;
  for (int i = half; i < w; ++i) {
    const double t = static_cast<double>(i - half) / fade;
    v[i] *= 0.5 * (1.0 + std::cos(std::numbers::pi * t));
  }
  return v;
}

ImpulseResponse PathEnsemble::Mean() const {
  Validate();
  std::vector<double> mean(path_length(), 0.0);
  for (const auto& v : variants) {
    for (int i = 0; i < path_length(); ++i) mean[i] += v[i];
  }
  for (double& m : mean) m /= size();
  return ImpulseResponse(std::move(mean), nominal.sample_rate());
}

void PathEnsemble::Validate() const {
  if (variants.empty()) throw ArgumentError("PathEnsemble: J must be >= 1");
  if (labels.size() != variants.size()) {
    throw ArgumentError("PathEnsemble: one label per variant is required");
  }
  for (std::size_t j = 0; j < variants.size(); ++j) {
    if (variants[j].size() != nominal.size() ||
        variants[j].sample_rate() != nominal.sample_rate()) {
      throw ArgumentError(fmt::format(
          "PathEnsemble: variant '{}' does not match the nominal length or "
          "sample rate",
          labels[j]));
    }
  }
}

PathEnsemble GeneratePathEnsemble(const ImpulseResponse& nominal,
                                  const VariationSpec& spec, int count) {
  if (count < 1) throw ArgumentError("GeneratePathEnsemble: J must be >= 1");
  const int lg = static_cast<int>(nominal.size());
  spec.Validate(lg);
  PathEnsemble ensemble{nominal, {}, {}, spec, true};
  ensemble.variants.reserve(count);
  for (int j = 0; j < count; ++j) {
    const std::vector<double> v =
        PerturbationFilter(spec, j, nominal.sample_rate());
    std::vector<double> variant = FullConvolve(nominal.taps(), v);
    variant.resize(lg);
    ensemble.variants.emplace_back(std::move(variant), nominal.sample_rate());
    ensemble.labels.push_back(fmt::format("path_{:02d}", j + 1));
  }
  return ensemble;
}

void SavePathEnsemble(const PathEnsemble& ensemble, const std::string& dir) {
  ensemble.Validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("{}: cannot create directory: {}", dir,
                              ec.message()));
  }
  nlohmann::ordered_json manifest;
  manifest["format"] = "ssanc-path-ensemble";
  manifest["version"] = 1;
  manifest["sample_rate"] = ensemble.nominal.sample_rate();
  manifest["path_length"] = ensemble.path_length();
  manifest["count"] = ensemble.size();
  manifest["nominal_file"] = "nominal.wav";
  manifest["labels"] = ensemble.labels;
  std::vector<std::string> files;
  for (const auto& label : ensemble.labels) files.push_back(label + ".wav");
  manifest["files"] = files;
  manifest["generated"] = ensemble.generated;
  if (ensemble.generated) {
    // Window and variation magnitudes are stand-in values, not measured.
    manifest["placeholder_defaults"] = true;
    manifest["spec"] = {
        {"magnitude_db_std", ensemble.spec.magnitude_db_std},
        {"n_bands", ensemble.spec.n_bands},
        {"phase_jitter_std", ensemble.spec.phase_jitter_std},
        {"window_length", ensemble.spec.window_length},
        {"window", "flat-then-half-hann"},
        {"seed", ensemble.spec.seed}};
  }
  const std::filesystem::path root(dir);
  WriteSingleChannel(ensemble.nominal, (root / "nominal.wav").string());
  for (int j = 0; j < ensemble.size(); ++j) {
    WriteSingleChannel(ensemble.variants[j], (root / files[j]).string());
  }
  const std::string path = (root / "ensemble.json").string();
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("{}: cannot open for writing", path));
  out << manifest.dump(2) << "\n";
}

PathEnsemble LoadPathEnsemble(const std::string& dir) {
  const std::filesystem::path root(dir);
  const std::string path = (root / "ensemble.json").string();
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("{}: cannot open manifest", path));
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
    const auto labels = manifest.at("labels").get<std::vector<std::string>>();
    const auto files = manifest.at("files").get<std::vector<std::string>>();
    if (labels.size() != files.size()) {
      throw IoError(fmt::format("{}: 'labels' and 'files' differ in length",
                                path));
    }
    const int fs = manifest.at("sample_rate").get<int>();
    PathEnsemble ensemble{
        ReadSingleChannel(
            (root / manifest.at("nominal_file").get<std::string>()).string()),
        {}, labels, VariationSpec{}, manifest.value("generated", false)};
    if (ensemble.generated && manifest.contains("spec")) {
      const auto& s = manifest.at("spec");
      ensemble.spec.magnitude_db_std = s.at("magnitude_db_std").get<double>();
      ensemble.spec.n_bands = s.at("n_bands").get<int>();
      ensemble.spec.phase_jitter_std = s.at("phase_jitter_std").get<double>();
      ensemble.spec.window_length = s.at("window_length").get<int>();
      ensemble.spec.seed = s.at("seed").get<std::uint64_t>();
    }
    for (const auto& f : files) {
      ensemble.variants.push_back(ReadSingleChannel((root / f).string()));
    }
    if (ensemble.nominal.sample_rate() != fs) {
      throw IoError(fmt::format("{}: 'sample_rate' disagrees with nominal.wav",
                                path));
    }
    ensemble.Validate();
    return ensemble;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(fmt::format("{}: malformed manifest: {}", path, e.what()));
  } catch (const ArgumentError& e) {
    throw IoError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace ssanc

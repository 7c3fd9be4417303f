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

#include "ssanc/dsp_core.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/FFT>

#include "ssanc/errors.h"

namespace ssanc {
namespace {

// Below this operand length direct summation beats the FFT round trip.
constexpr std::size_t kDirectConvolutionLimit = 48;

std::vector<double> DirectFullConvolve(std::span<const double> a,
                                       std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b[j];
  }
  return out;
}

std::vector<double> FftFullConvolve(std::span<const double> a,
                                    std::span<const double> b) {
  const std::size_t n_out = a.size() + b.size() - 1;
  const int nfft = NextPowerOfTwo(static_cast<int>(n_out));
  auto fa = RealFftForward(a, nfft);
  const auto fb = RealFftForward(b, nfft);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> out = RealFftInverse(fa, nfft);
  out.resize(n_out);
  return out;
}

}  // namespace

ImpulseResponse::ImpulseResponse(std::vector<double> coefficients,
                                 int sample_rate)
    : coefficients_(std::move(coefficients)), sample_rate_(sample_rate) {
  if (coefficients_.empty()) {
    throw ArgumentError("ImpulseResponse: at least one tap is required");
  }
  if (sample_rate_ <= 0) {
    throw ArgumentError("ImpulseResponse: sample_rate must be positive, got " +
                        std::to_string(sample_rate_));
  }
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    if (!std::isfinite(coefficients_[i])) {
      throw ArgumentError("ImpulseResponse: tap " + std::to_string(i) +
                          " is not finite");
    }
  }
}

ImpulseResponse ImpulseResponse::UnitImpulse(int length, int lag,
                                             int sample_rate) {
  if (length < 1 || lag < 0 || lag >= length) {
    throw ArgumentError("UnitImpulse: lag must lie in [0, length)");
  }
  std::vector<double> taps(length, 0.0);
  taps[lag] = 1.0;
  return ImpulseResponse(std::move(taps), sample_rate);
}

double ImpulseResponse::Energy() const {
  double e = 0.0;
  for (double c : coefficients_) e += c * c;
  return e;
}

MultichannelSignal::MultichannelSignal(
    std::vector<std::vector<double>> channels, int sample_rate)
    : channels_(std::move(channels)), sample_rate_(sample_rate) {
  if (channels_.empty()) {
    throw ArgumentError("MultichannelSignal: at least one channel is required");
  }
  if (sample_rate_ <= 0) {
    throw ArgumentError("MultichannelSignal: sample_rate must be positive");
  }
  const std::size_t n = channels_.front().size();
  if (n == 0) throw ArgumentError("MultichannelSignal: channels are empty");
  for (std::size_t k = 1; k < channels_.size(); ++k) {
    if (channels_[k].size() != n) {
      throw ArgumentError("MultichannelSignal: channel " + std::to_string(k) +
                          " has " + std::to_string(channels_[k].size()) +
                          " samples, expected " + std::to_string(n));
    }
  }
}

std::span<const double> MultichannelSignal::channel(int k) const {
  if (k < 0 || k >= num_channels()) {
    throw ArgumentError("MultichannelSignal: channel index " +
                        std::to_string(k) + " out of range");
  }
  return channels_[k];
}

double MultichannelSignal::Peak() const {
  double peak = 0.0;
  for (const auto& ch : channels_) {
    for (double v : ch) peak = std::max(peak, std::abs(v));
  }
  return peak;
}

std::vector<double> Convolve(std::span<const double> h,
                             std::span<const double> x) {
  if (h.empty() || x.empty()) {
    throw ArgumentError("Convolve: kernel and signal must be non-empty");
  }
  const std::size_t n = x.size();
  if (std::min(h.size(), n) <= kDirectConvolutionLimit) {
    std::vector<double> y(n, 0.0);
    const std::size_t taps = std::min(h.size(), n);
    for (std::size_t i = 0; i < taps; ++i) {
      const double hi = h[i];
      if (hi == 0.0) continue;
      for (std::size_t t = i; t < n; ++t) y[t] += hi * x[t - i];
    }
    return y;
  }
  std::vector<double> y =
      FftFullConvolve(h.first(std::min(h.size(), n)), x);
  y.resize(n);
  return y;
}

std::vector<double> Convolve(const ImpulseResponse& h,
                             std::span<const double> x) {
  return Convolve(h.taps(), x);
}

std::vector<double> FullConvolve(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw ArgumentError("FullConvolve: operands must be non-empty");
  }
  if (std::min(a.size(), b.size()) <= kDirectConvolutionLimit) {
    return DirectFullConvolve(a, b);
  }
  return FftFullConvolve(a, b);
}

std::vector<double> CrossCorrelate(std::span<const double> a,
                                   std::span<const double> b) {
  // sum_t a[t] b[t + m] is the full convolution of reversed(a) with b.
  std::vector<double> reversed(a.rbegin(), a.rend());
  return FullConvolve(reversed, b);
}

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::complex<double>> RealFftForward(std::span<const double> x,
                                                 int nfft) {
  std::vector<double> padded(nfft, 0.0);
  std::copy_n(x.begin(), std::min<std::size_t>(x.size(), nfft),
              padded.begin());
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> bins;
  fft.fwd(bins, padded);
  return bins;
}

std::vector<double> RealFftInverse(std::span<const std::complex<double>> bins,
                                   int nfft) {
  if (static_cast<int>(bins.size()) != nfft / 2 + 1) {
    throw ArgumentError("RealFftInverse: expected nfft/2 + 1 bins");
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spectrum(bins.begin(), bins.end());
  std::vector<double> out;
  fft.inv(out, spectrum, nfft);
  return out;
}

// ---------------------------------------------------------------------------

ToeplitzConvOperator::ToeplitzConvOperator(std::vector<double> kernel,
                                           int n_cols)
    : kernel_(std::move(kernel)), n_cols_(n_cols) {
  if (kernel_.empty()) {
    throw ArgumentError("ToeplitzConvOperator: kernel must be non-empty");
  }
  if (n_cols_ < 1) {
    throw ArgumentError("ToeplitzConvOperator: n_cols must be >= 1");
  }
}

Vector ToeplitzConvOperator::Apply(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != n_cols_) {
    throw ArgumentError("ToeplitzConvOperator::Apply: expected " +
                        std::to_string(n_cols_) + " entries, got " +
                        std::to_string(v.size()));
  }
  const std::vector<double> full =
      FullConvolve(kernel_, std::span<const double>(v.data(), v.size()));
  return Eigen::Map<const Vector>(full.data(), full.size());
}

Vector ToeplitzConvOperator::ApplyTranspose(
    const Eigen::Ref<const Vector>& u) const {
  if (u.size() != rows()) {
    throw ArgumentError("ToeplitzConvOperator::ApplyTranspose: expected " +
                        std::to_string(rows()) + " entries, got " +
                        std::to_string(u.size()));
  }
  // out[c] = sum_i kernel[i] u[c + i], the correlation at lag c.
  const std::vector<double> r =
      CrossCorrelate(kernel_, std::span<const double>(u.data(), u.size()));
  const std::size_t offset = kernel_.size() - 1;
  Vector out(n_cols_);
  for (int c = 0; c < n_cols_; ++c) out[c] = r[offset + c];
  return out;
}

Matrix ToeplitzConvOperator::Dense() const {
  Matrix m = Matrix::Zero(rows(), n_cols_);
  for (int c = 0; c < n_cols_; ++c) {
    for (std::size_t i = 0; i < kernel_.size(); ++i) m(c + i, c) = kernel_[i];
  }
  return m;
}

double AcausalKernel::AtLag(int lag) const {
  const int index = lag + acausal_length;
  if (index < 0 || index >= static_cast<int>(taps.size())) return 0.0;
  return taps[index];
}

AcausalToeplitzOperator::AcausalToeplitzOperator(AcausalKernel kernel,
                                                 int n_cols)
    : kernel_(std::move(kernel)), conv_(kernel_.taps, n_cols) {
  if (kernel_.acausal_length < 0 || kernel_.causal_length() < 0) {
    throw ArgumentError(
        "AcausalToeplitzOperator: acausal_length must lie in [0, len(taps)]");
  }
}

BlockConvOperator::BlockConvOperator(std::vector<ToeplitzConvOperator> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) {
    throw ArgumentError("BlockConvOperator: at least one block is required");
  }
  for (const auto& b : blocks_) {
    if (b.rows() != blocks_.front().rows() ||
        b.cols() != blocks_.front().cols()) {
      throw ArgumentError("BlockConvOperator: blocks must share one shape");
    }
  }
}

Vector BlockConvOperator::Apply(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != cols()) {
    throw ArgumentError("BlockConvOperator::Apply: expected " +
                        std::to_string(cols()) + " entries, got " +
                        std::to_string(v.size()));
  }
  Vector out(rows());
  const int r = block_rows();
  const int c = block_cols();
  for (int k = 0; k < num_blocks(); ++k) {
    out.segment(k * r, r) = blocks_[k].Apply(v.segment(k * c, c));
  }
  return out;
}

Vector BlockConvOperator::ApplyTranspose(
    const Eigen::Ref<const Vector>& u) const {
  if (u.size() != rows()) {
    throw ArgumentError("BlockConvOperator::ApplyTranspose: expected " +
                        std::to_string(rows()) + " entries, got " +
                        std::to_string(u.size()));
  }
  Vector out(cols());
  const int r = block_rows();
  const int c = block_cols();
  for (int k = 0; k < num_blocks(); ++k) {
    out.segment(k * c, c) = blocks_[k].ApplyTranspose(u.segment(k * r, r));
  }
  return out;
}

Matrix BlockConvOperator::Dense() const {
  Matrix m = Matrix::Zero(rows(), cols());
  for (int k = 0; k < num_blocks(); ++k) {
    m.block(k * block_rows(), k * block_cols(), block_rows(), block_cols()) =
        blocks_[k].Dense();
  }
  return m;
}

BlockConvOperator BlockSecondaryOperator(const ImpulseResponse& g,
                                         int n_channels, int filter_length) {
  return LatencyAwareSecondaryOperator(g, n_channels, filter_length, 0, 0);
}

BlockConvOperator LatencyAwareSecondaryOperator(const ImpulseResponse& g,
                                                int n_channels,
                                                int filter_length,
                                                int ff_latency,
                                                int fb_latency) {
  if (n_channels < 1) {
    throw ArgumentError("secondary operator: n_channels must be >= 1");
  }
  if (filter_length < 1) {
    throw ArgumentError("secondary operator: filter_length must be >= 1");
  }
  if (ff_latency < 0 || fb_latency < 0) {
    throw ArgumentError("secondary operator: latencies must be >= 0");
  }
  const std::size_t padded = g.size() + std::max(ff_latency, fb_latency);
  std::vector<ToeplitzConvOperator> blocks;
  blocks.reserve(n_channels);
  for (int k = 0; k < n_channels; ++k) {
    const int delay = (k + 1 < n_channels) ? ff_latency : fb_latency;
    std::vector<double> kernel(padded, 0.0);
    std::copy(g.coefficients().begin(), g.coefficients().end(),
              kernel.begin() + delay);
    blocks.emplace_back(std::move(kernel), filter_length);
  }
  return BlockConvOperator(std::move(blocks));
}

}  // namespace ssanc

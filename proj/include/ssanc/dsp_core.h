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

// FIR primitives and the matrix-free convolution operators used to build the
// control-filter design problem.
//
// Two distinct kinds of convolution appear throughout the toolkit:
//   * Convolve():      same-length causal filtering, y[n] = sum_i h[i] x[n-i]
//                      with x[m] = 0 for m < 0; output has length len(x).
//   * FullConvolve():  zero-padded linear convolution, length a + b - 1.
// The Toeplitz operators below always realize the second kind.

#ifndef SSANC_DSP_CORE_H_
#define SSANC_DSP_CORE_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ssanc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A finite impulse response with its sample rate. Coefficients are unitless
// tap gains; at least one tap, all finite.
class ImpulseResponse {
 public:
  ImpulseResponse(std::vector<double> coefficients, int sample_rate);

  // A unit impulse at `lag` in a response of `length` taps.
  static ImpulseResponse UnitImpulse(int length, int lag, int sample_rate);

  const std::vector<double>& coefficients() const { return coefficients_; }
  std::span<const double> taps() const { return coefficients_; }
  std::size_t size() const { return coefficients_.size(); }
  int sample_rate() const { return sample_rate_; }
  double operator[](std::size_t i) const { return coefficients_[i]; }
  double Energy() const;

 private:
  std::vector<double> coefficients_;
  int sample_rate_;
};

// K real channels of common length N >= 1.
class MultichannelSignal {
 public:
  MultichannelSignal(std::vector<std::vector<double>> channels,
                     int sample_rate);

  int num_channels() const { return static_cast<int>(channels_.size()); }
  std::size_t num_samples() const { return channels_.front().size(); }
  int sample_rate() const { return sample_rate_; }
  std::span<const double> channel(int k) const;
  const std::vector<std::vector<double>>& channels() const {
    return channels_;
  }
  double Peak() const;

 private:
  std::vector<std::vector<double>> channels_;
  int sample_rate_;
};

// Same-length causal filtering. Throws ArgumentError on empty input.
std::vector<double> Convolve(std::span<const double> h,
                             std::span<const double> x);
std::vector<double> Convolve(const ImpulseResponse& h,
                             std::span<const double> x);

// Zero-padded linear convolution (length a + b - 1). Uses FFT once both
// operands are long; direct summation otherwise.
std::vector<double> FullConvolve(std::span<const double> a,
                                 std::span<const double> b);

// Full cross-correlation r[m] = sum_t a[t] b[t + m], returned for
// m = -(len(a) - 1) ... len(b) - 1, i.e. r[m] lives at index m + len(a) - 1.
std::vector<double> CrossCorrelate(std::span<const double> a,
                                   std::span<const double> b);

int NextPowerOfTwo(int n);

// Half-spectrum real FFT helpers (nfft/2 + 1 bins). `x` is zero-padded or
// truncated to nfft. The inverse is scaled so Inverse(Forward(x)) == x.
std::vector<std::complex<double>> RealFftForward(std::span<const double> x,
                                                 int nfft);
std::vector<double> RealFftInverse(std::span<const std::complex<double>> bins,
                                   int nfft);

// Convolution matrix of `kernel` with n_cols columns; rows = len + n_cols - 1
// and column c holds the kernel shifted down by c. Applied matrix-free.
class ToeplitzConvOperator {
 public:
  ToeplitzConvOperator(std::vector<double> kernel, int n_cols);

  int rows() const { return static_cast<int>(kernel_.size()) + n_cols_ - 1; }
  int cols() const { return n_cols_; }
  const std::vector<double>& kernel() const { return kernel_; }

  Vector Apply(const Eigen::Ref<const Vector>& v) const;
  Vector ApplyTranspose(const Eigen::Ref<const Vector>& u) const;
  // For small-instance oracles and the dense design path only.
  Matrix Dense() const;

 private:
  std::vector<double> kernel_;
  int n_cols_;
};

// Relative impulse response with taps at lags -acausal_length ...
// causal_length - 1. taps[i] is the coefficient at lag i - acausal_length.
struct AcausalKernel {
  std::vector<double> taps;
  int acausal_length = 0;

  int causal_length() const {
    return static_cast<int>(taps.size()) - acausal_length;
  }
  double AtLag(int lag) const;
};

// Convolution matrix of an acausal kernel: rows = L_a + L_h + n_cols - 1 and
// row 0 of column 0 holds the tap at lag -L_a.
class AcausalToeplitzOperator {
 public:
  AcausalToeplitzOperator(AcausalKernel kernel, int n_cols);

  int rows() const { return conv_.rows(); }
  int cols() const { return conv_.cols(); }
  int acausal_length() const { return kernel_.acausal_length; }
  int causal_length() const { return kernel_.causal_length(); }
  const AcausalKernel& kernel() const { return kernel_; }

  Vector Apply(const Eigen::Ref<const Vector>& v) const {
    return conv_.Apply(v);
  }
  Vector ApplyTranspose(const Eigen::Ref<const Vector>& u) const {
    return conv_.ApplyTranspose(u);
  }
  Matrix Dense() const { return conv_.Dense(); }

 private:
  AcausalKernel kernel_;
  ToeplitzConvOperator conv_;
};

// Block-diagonal stack of equally shaped convolution operators, acting on a
// vector of num_blocks() concatenated segments of block_cols() samples.
class BlockConvOperator {
 public:
  explicit BlockConvOperator(std::vector<ToeplitzConvOperator> blocks);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int block_rows() const { return blocks_.front().rows(); }
  int block_cols() const { return blocks_.front().cols(); }
  int rows() const { return num_blocks() * block_rows(); }
  int cols() const { return num_blocks() * block_cols(); }
  const ToeplitzConvOperator& block(int k) const { return blocks_[k]; }

  Vector Apply(const Eigen::Ref<const Vector>& v) const;
  Vector ApplyTranspose(const Eigen::Ref<const Vector>& u) const;
  Matrix Dense() const;

 private:
  std::vector<ToeplitzConvOperator> blocks_;
};

// blkdiag(G ... G) with the same secondary-path convolution matrix on every
// one of n_channels blocks of filter_length taps.
BlockConvOperator BlockSecondaryOperator(const ImpulseResponse& g,
                                         int n_channels, int filter_length);

// As BlockSecondaryOperator, but folds processing latencies into the path:
// the first n_channels - 1 (feedforward) blocks see g delayed by ff_latency,
// the last (feedback) block sees g delayed by fb_latency. All kernels are
// zero-padded to len(g) + max(ff_latency, fb_latency).
BlockConvOperator LatencyAwareSecondaryOperator(const ImpulseResponse& g,
                                                int n_channels,
                                                int filter_length,
                                                int ff_latency,
                                                int fb_latency);

}  // namespace ssanc

#endif  // SSANC_DSP_CORE_H_

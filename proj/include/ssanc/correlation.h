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

// Sample estimates of the stacked input correlation E{x(n) x(n)^T}.
//
// x(n) stacks num_blocks() windows [s_k(n), s_k(n-1), ..., s_k(n-L+1)], one
// per input channel. The last channel is the leakage (estimate), so the
// selection vector q picks entry (num_blocks() - 1) * L.

#ifndef SSANC_CORRELATION_H_
#define SSANC_CORRELATION_H_

#include <memory>
#include <vector>

#include "ssanc/dsp_core.h"

namespace ssanc {

// Products of R with a block secondary operator G. Shapes follow G's column
// space: a_r = G^T R G, b_r = G^T R q, q_r_q = q^T R q.
struct FilteredCorrelation {
  Matrix a_r;
  Vector b_r;
  double q_r_q = 0.0;
};

class InputCorrelation {
 public:
  virtual ~InputCorrelation() = default;

  virtual int num_blocks() const = 0;
  virtual int block_length() const = 0;
  int dim() const { return num_blocks() * block_length(); }

  virtual Vector Apply(const Eigen::Ref<const Vector>& v) const = 0;
  virtual FilteredCorrelation Filtered(const BlockConvOperator& g) const = 0;
  // Materializes R. Meant for small instances and oracles.
  virtual Matrix Dense() const = 0;
};

class DenseCorrelation : public InputCorrelation {
 public:
  // `r` must be square with a side of num_blocks * block_length; it is
  // symmetrized on construction.
  DenseCorrelation(Matrix r, int num_blocks);

  int num_blocks() const override { return num_blocks_; }
  int block_length() const override { return block_length_; }
  Vector Apply(const Eigen::Ref<const Vector>& v) const override;
  FilteredCorrelation Filtered(const BlockConvOperator& g) const override;
  Matrix Dense() const override { return r_; }
  const Matrix& matrix() const { return r_; }

 private:
  Matrix r_;
  int num_blocks_;
  int block_length_;
};

// Keeps the input signals and evaluates everything through convolutions, so
// R is never stored.
class FrameCorrelation : public InputCorrelation {
 public:
  FrameCorrelation(std::vector<std::vector<double>> signals, int block_length,
                   int hop);

  int num_blocks() const override {
    return static_cast<int>(signals_.size());
  }
  int block_length() const override { return block_length_; }
  int num_frames() const { return num_frames_; }
  Vector Apply(const Eigen::Ref<const Vector>& v) const override;
  FilteredCorrelation Filtered(const BlockConvOperator& g) const override;
  Matrix Dense() const override;

 private:
  std::vector<std::vector<double>> signals_;
  int block_length_;
  int hop_;
  int first_frame_;
  int num_frames_;
};

// (1 / F) sum_n x(n) x(n)^T over arbitrary stacked frames. All frames must
// share a dimension divisible by num_blocks.
DenseCorrelation EstimateInputCorrelation(const std::vector<Vector>& frames,
                                          int num_blocks);

// M(i, j) = (1 / F) sum_{m} a(n_m - i) b(n_m - j) for i, j < num_lags, with
// frame times n_m = first, first + hop, ... <= len - 1. Requires
// first >= num_lags - 1 and equal signal lengths.
Matrix LagCorrelation(std::span<const double> a, std::span<const double> b,
                      int first, int hop, int num_lags);

// Frames start at the first sample where every window is filled (L - 1) and
// advance by `hop`. Uses a dense estimate when the dimension is at most
// dense_threshold, the frame operator otherwise.
std::shared_ptr<const InputCorrelation> BuildInputCorrelation(
    const std::vector<std::vector<double>>& signals, int block_length,
    int hop, int dense_threshold);

}  // namespace ssanc

#endif  // SSANC_CORRELATION_H_

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

#include "ssanc/correlation.h"

#include <fmt/format.h>

#include "ssanc/errors.h"

namespace ssanc {
namespace {

void CheckOperatorShape(const BlockConvOperator& g, int num_blocks,
                        int block_length) {
  if (g.num_blocks() != num_blocks || g.block_rows() != block_length) {
    throw ArgumentError(fmt::format(
        "correlation: secondary operator has {} blocks of {} rows, expected "
        "{} blocks of {}",
        g.num_blocks(), g.block_rows(), num_blocks, block_length));
  }
}

}  // namespace

DenseCorrelation::DenseCorrelation(Matrix r, int num_blocks)
    : r_(std::move(r)), num_blocks_(num_blocks), block_length_(0) {
  if (num_blocks_ < 1 || r_.rows() != r_.cols() || r_.rows() == 0 ||
      r_.rows() % num_blocks_ != 0) {
    throw ArgumentError(fmt::format(
        "DenseCorrelation: a {}x{} matrix cannot hold {} equal blocks",
        r_.rows(), r_.cols(), num_blocks_));
  }
  block_length_ = static_cast<int>(r_.rows()) / num_blocks_;
  r_ = 0.5 * (r_ + r_.transpose()).eval();
}

Vector DenseCorrelation::Apply(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != dim()) {
    throw ArgumentError(fmt::format(
        "DenseCorrelation::Apply: expected {} entries, got {}", dim(),
        v.size()));
  }
  return r_ * v;
}

FilteredCorrelation DenseCorrelation::Filtered(
    const BlockConvOperator& g) const {
  CheckOperatorShape(g, num_blocks_, block_length_);
  const Matrix gd = g.Dense();
  const int q = (num_blocks_ - 1) * block_length_;
  FilteredCorrelation out;
  out.a_r = gd.transpose() * r_ * gd;
  out.b_r = gd.transpose() * r_.col(q);
  out.q_r_q = r_(q, q);
  return out;
}

Matrix LagCorrelation(std::span<const double> a, std::span<const double> b,
                      int first, int hop, int num_lags) {
  if (a.size() != b.size()) {
    throw ArgumentError("LagCorrelation: signals differ in length");
  }
  const int n = static_cast<int>(a.size());
  if (num_lags < 1 || hop < 1 || first < num_lags - 1 || first >= n) {
    throw ArgumentError(fmt::format(
        "LagCorrelation: invalid frame layout (first {}, hop {}, lags {}, "
        "length {})",
        first, hop, num_lags, n));
  }
  const int frames = (n - 1 - first) / hop + 1;
  Matrix m(num_lags, num_lags);
  if (hop == 1) {
    // Edge row and column directly, interior by sliding both windows:
    // S(i+1, j+1) = S(i, j) + a(first-1-i) b(first-1-j) - a(n-1-i) b(n-1-j).
    for (int j = 0; j < num_lags; ++j) {
      double row = 0.0;
      double col = 0.0;
      for (int t = first; t < n; ++t) {
        row += a[t] * b[t - j];
        col += a[t - j] * b[t];
      }
      m(0, j) = row;
      m(j, 0) = col;
    }
    for (int i = 0; i + 1 < num_lags; ++i) {
      for (int j = 0; j + 1 < num_lags; ++j) {
        m(i + 1, j + 1) = m(i, j) + a[first - 1 - i] * b[first - 1 - j] -
                          a[n - 1 - i] * b[n - 1 - j];
      }
    }
  } else {
    m.setZero();
    for (int t = first; t < n; t += hop) {
      for (int i = 0; i < num_lags; ++i) {
        const double ai = a[t - i];
        for (int j = 0; j < num_lags; ++j) m(i, j) += ai * b[t - j];
      }
    }
  }
  return m / frames;
}

FrameCorrelation::FrameCorrelation(std::vector<std::vector<double>> signals,
                                   int block_length, int hop)
    : signals_(std::move(signals)),
      block_length_(block_length),
      hop_(hop),
      first_frame_(block_length - 1),
      num_frames_(0) {
  if (signals_.empty()) {
    throw ArgumentError("FrameCorrelation: at least one signal is required");
  }
  if (block_length_ < 1 || hop_ < 1) {
    throw ArgumentError("FrameCorrelation: block_length and hop must be >= 1");
  }
  const std::size_t n = signals_.front().size();
  for (const auto& s : signals_) {
    if (s.size() != n) {
      throw ArgumentError("FrameCorrelation: signals differ in length");
    }
  }
  if (static_cast<int>(n) < block_length_) {
    throw ArgumentError(fmt::format(
        "FrameCorrelation: {} samples cannot fill one window of {}", n,
        block_length_));
  }
  num_frames_ = (static_cast<int>(n) - 1 - first_frame_) / hop_ + 1;
}

Vector FrameCorrelation::Apply(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != dim()) {
    throw ArgumentError(fmt::format(
        "FrameCorrelation::Apply: expected {} entries, got {}", dim(),
        v.size()));
  }
  const std::size_t n = signals_.front().size();
  const int len = block_length_;
  // z(n) = x(n)^T v on the frame grid, zero elsewhere.
  std::vector<double> z(n, 0.0);
  for (int k = 0; k < num_blocks(); ++k) {
    const std::vector<double> part = Convolve(
        std::span<const double>(v.data() + k * len, len), signals_[k]);
    for (std::size_t t = 0; t < n; ++t) z[t] += part[t];
  }
  std::vector<double> masked(n, 0.0);
  for (std::size_t t = first_frame_; t < n; t += hop_) masked[t] = z[t];

  Vector out(dim());
  for (int k = 0; k < num_blocks(); ++k) {
    const std::vector<double> r = CrossCorrelate(signals_[k], masked);
    for (int i = 0; i < len; ++i) {
      out[k * len + i] = r[i + n - 1] / num_frames_;
    }
  }
  return out;
}

FilteredCorrelation FrameCorrelation::Filtered(
    const BlockConvOperator& g) const {
  CheckOperatorShape(g, num_blocks(), block_length_);
  const int lw = g.block_cols();
  std::vector<std::vector<double>> u;
  u.reserve(num_blocks());
  for (int k = 0; k < num_blocks(); ++k) {
    u.push_back(Convolve(g.block(k).kernel(), signals_[k]));
  }
  FilteredCorrelation out;
  out.a_r.resize(g.cols(), g.cols());
  for (int k = 0; k < num_blocks(); ++k) {
    for (int l = k; l < num_blocks(); ++l) {
      const Matrix m = LagCorrelation(u[k], u[l], first_frame_, hop_, lw);
      out.a_r.block(k * lw, l * lw, lw, lw) = m;
      out.a_r.block(l * lw, k * lw, lw, lw) = m.transpose();
    }
  }
  const std::vector<double>& p = signals_.back();
  const int n = static_cast<int>(p.size());
  out.b_r.setZero(g.cols());
  for (int k = 0; k < num_blocks(); ++k) {
    for (int c = 0; c < lw; ++c) {
      double acc = 0.0;
      for (int t = first_frame_; t < n; t += hop_) acc += u[k][t - c] * p[t];
      out.b_r[k * lw + c] = acc / num_frames_;
    }
  }
  double acc = 0.0;
  for (int t = first_frame_; t < n; t += hop_) acc += p[t] * p[t];
  out.q_r_q = acc / num_frames_;
  return out;
}

Matrix FrameCorrelation::Dense() const {
  const int len = block_length_;
  Matrix r(dim(), dim());
  for (int k = 0; k < num_blocks(); ++k) {
    for (int l = k; l < num_blocks(); ++l) {
      const Matrix m =
          LagCorrelation(signals_[k], signals_[l], first_frame_, hop_, len);
      r.block(k * len, l * len, len, len) = m;
      r.block(l * len, k * len, len, len) = m.transpose();
    }
  }
  return r;
}

DenseCorrelation EstimateInputCorrelation(const std::vector<Vector>& frames,
                                          int num_blocks) {
  if (frames.empty()) {
    throw ArgumentError("EstimateInputCorrelation: at least one frame needed");
  }
  const Eigen::Index dim = frames.front().size();
  Matrix r = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].size() != dim) {
      throw ArgumentError(fmt::format(
          "EstimateInputCorrelation: frame {} has dimension {}, expected {}",
          i, frames[i].size(), dim));
    }
    r.selfadjointView<Eigen::Lower>().rankUpdate(frames[i]);
  }
  r.triangularView<Eigen::StrictlyUpper>() = r.transpose();
  r /= static_cast<double>(frames.size());
  return DenseCorrelation(std::move(r), num_blocks);
}

std::shared_ptr<const InputCorrelation> BuildInputCorrelation(
    const std::vector<std::vector<double>>& signals, int block_length,
    int hop, int dense_threshold) {
  auto frames = std::make_shared<FrameCorrelation>(signals, block_length, hop);
  if (frames->dim() <= dense_threshold) {
    return std::make_shared<DenseCorrelation>(frames->Dense(),
                                              frames->num_blocks());
  }
  return frames;
}

}  // namespace ssanc

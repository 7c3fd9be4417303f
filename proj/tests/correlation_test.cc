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

#include <random>

#include <gtest/gtest.h>

#include "oracle.h"
#include "ssanc/errors.h"

namespace ssanc {
namespace {

std::vector<std::vector<double>> Signals(std::mt19937_64& rng, int k, int n) {
  std::vector<std::vector<double>> s;
  for (int i = 0; i < k; ++i) s.push_back(oracle::RandomVector(rng, n));
  return s;
}

TEST(FrameCorrelationTest, DenseMatchesExplicitFrames) {
  std::mt19937_64 rng(31);
  for (int hop : {1, 3}) {
    const auto s = Signals(rng, 3, 120);
    const FrameCorrelation r(s, 9, hop);
    const oracle::Matrix x = oracle::FrameMatrix(s, 9, hop);
    EXPECT_EQ(r.num_frames(), x.cols());
    const oracle::Matrix want = x * x.transpose() / x.cols();
    EXPECT_LE(oracle::RelativeError(r.Dense(), want), 1e-12);
  }
}

TEST(FrameCorrelationTest, ApplyMatchesDense) {
  std::mt19937_64 rng(32);
  const auto s = Signals(rng, 2, 300);
  for (int hop : {1, 2}) {
    const FrameCorrelation r(s, 70, hop);
    const oracle::Matrix x = oracle::FrameMatrix(s, 70, hop);
    const std::vector<double> vs = oracle::RandomVector(rng, r.dim());
    const Vector v = Eigen::Map<const Vector>(vs.data(), r.dim());
    const Vector want = x * (x.transpose() * v) / x.cols();
    EXPECT_LE(oracle::RelativeError(r.Apply(v), want), 1e-12);
  }
}

TEST(FrameCorrelationTest, FilteredMatchesDenseProducts) {
  std::mt19937_64 rng(33);
  const int lw = 5;
  const std::vector<double> g = {0.9, -0.3, 0.2, 0.05};
  const int ff = 2;
  const int fb = 3;
  const int block = static_cast<int>(g.size()) + 3 + lw - 1;
  const auto s = Signals(rng, 3, 200);
  const BlockConvOperator op =
      LatencyAwareSecondaryOperator(ImpulseResponse(g, 8000), 3, lw, ff, fb);
  const oracle::Matrix gm = oracle::SecondaryMatrix(g, 3, lw, ff, fb);
  const oracle::Matrix x = oracle::FrameMatrix(s, block, 1);
  const oracle::Matrix rm = x * x.transpose() / x.cols();
  oracle::Vector q = oracle::Vector::Zero(3 * block);
  q(2 * block) = 1.0;
  const FrameCorrelation frames(s, block, 1);
  const DenseCorrelation dense(rm, 3);
  for (const InputCorrelation* r :
       {static_cast<const InputCorrelation*>(&frames),
        static_cast<const InputCorrelation*>(&dense)}) {
    const FilteredCorrelation f = r->Filtered(op);
    EXPECT_LE(oracle::RelativeError(f.a_r, gm.transpose() * rm * gm), 1e-12);
    EXPECT_LE(oracle::RelativeError(f.b_r, gm.transpose() * rm * q), 1e-12);
    EXPECT_NEAR(f.q_r_q, q.dot(rm * q), 1e-12 * std::abs(q.dot(rm * q)));
  }
}

TEST(DenseCorrelationTest, SymmetrizesAndChecksShape) {
  oracle::Matrix m(4, 4);
  m << 2, 1, 0, 0, 0, 2, 0, 0, 0, 0, 3, 1, 0, 0, 0, 3;
  const DenseCorrelation r(m, 2);
  EXPECT_EQ(r.block_length(), 2);
  EXPECT_EQ(r.matrix(), r.matrix().transpose());
  EXPECT_DOUBLE_EQ(r.matrix()(0, 1), 0.5);
  EXPECT_THROW(DenseCorrelation(oracle::Matrix::Zero(4, 3), 2), ArgumentError);
  EXPECT_THROW(DenseCorrelation(oracle::Matrix::Zero(5, 5), 2), ArgumentError);
}

TEST(LagCorrelationTest, MatchesDirectSums) {
  std::mt19937_64 rng(34);
  const std::vector<double> a = oracle::RandomVector(rng, 90);
  const std::vector<double> b = oracle::RandomVector(rng, 90);
  for (int hop : {1, 4}) {
    const int lags = 7;
    const int first = lags - 1;
    const Matrix m = LagCorrelation(a, b, first, hop, lags);
    int frames = 0;
    for (int n = first; n < 90; n += hop) ++frames;
    for (int i = 0; i < lags; ++i) {
      for (int j = 0; j < lags; ++j) {
        double want = 0.0;
        for (int n = first; n < 90; n += hop) want += a[n - i] * b[n - j];
        EXPECT_NEAR(m(i, j), want / frames, 1e-12);
      }
    }
  }
}

TEST(BuildInputCorrelationTest, SwitchesOnThreshold) {
  std::mt19937_64 rng(35);
  const auto s = Signals(rng, 2, 100);
  const auto dense = BuildInputCorrelation(s, 10, 1, 20);
  const auto frames = BuildInputCorrelation(s, 10, 1, 19);
  EXPECT_NE(dynamic_cast<const DenseCorrelation*>(dense.get()), nullptr);
  EXPECT_NE(dynamic_cast<const FrameCorrelation*>(frames.get()), nullptr);
  EXPECT_LE(oracle::RelativeError(dense->Dense(), frames->Dense()), 1e-15);
}

TEST(FrameCorrelationTest, RejectsShortOrRaggedSignals) {
  EXPECT_THROW(FrameCorrelation({std::vector<double>(5, 1.0)}, 10, 1),
               ArgumentError);
  EXPECT_THROW(FrameCorrelation({std::vector<double>(50, 1.0),
                                 std::vector<double>(40, 1.0)},
                                10, 1),
               ArgumentError);
  EXPECT_THROW(FrameCorrelation({std::vector<double>(50, 1.0)}, 10, 0),
               ArgumentError);
}

}  // namespace
}  // namespace ssanc

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

#include "ssanc/filter_design.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "instance.h"
#include "oracle.h"
#include "ssanc/errors.h"

namespace ssanc {
namespace {

using testing_support::Instance;
using testing_support::InstanceLimits;
using testing_support::RandomInstance;

TEST(DesignSoftTest, MatchesLeastSquaresOracle) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    InstanceLimits limits;
    limits.frame_correlation = trial % 2 == 1;
    const Instance inst = RandomInstance(rng, limits);
    const StackedControlFilter w = DesignSoft(inst.problem, inst.Operator());
    const oracle::Vector want = oracle::SolveLeastSquares(inst.dense);
    EXPECT_LE(oracle::RelativeError(w.stacked(), want), 1e-9)
        << "trial " << trial;
  }
}

TEST(DesignSoftTest, GradientVanishesAtSolution) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = RandomInstance(rng, {});
    const StackedControlFilter w = DesignSoft(inst.problem, inst.Operator());
    const double cost = oracle::Cost(inst.dense, w.stacked());
    const oracle::Vector grad =
        oracle::NumericGradient(inst.dense, w.stacked(), 1e-4);
    EXPECT_LE(grad.cwiseAbs().maxCoeff(), 1e-5 * (1.0 + cost));
  }
}

TEST(EvaluateCostTest, MatchesOracleCost) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    InstanceLimits limits;
    limits.frame_correlation = trial % 2 == 0;
    const Instance inst = RandomInstance(rng, limits);
    const std::vector<double> ws =
        oracle::RandomVector(rng, inst.dense.g.cols(), 0.3);
    const Vector wv = Eigen::Map<const Vector>(ws.data(), ws.size());
    const StackedControlFilter w(wv, inst.problem.num_blocks());
    const CostBreakdown c = EvaluateCost(w, inst.problem, inst.Operator());
    const double want = oracle::Cost(inst.dense, wv);
    EXPECT_NEAR(c.total, want, 1e-10 * want);
    EXPECT_NEAR(c.constraint_residual,
                oracle::ConstraintResidual(inst.dense, wv),
                1e-10 * (1.0 + c.constraint_residual));
    EXPECT_NEAR(c.constraint, inst.problem.mu * c.constraint_residual,
                1e-12 * (1.0 + c.constraint));
    EXPECT_NEAR(c.total, c.residual_power + c.regularization + c.constraint,
                1e-12 * c.total);
  }
}

TEST(QuadraticTermsTest, MatchDenseProducts) {
  std::mt19937_64 rng(44);
  const Instance inst = RandomInstance(rng, {});
  const QuadraticTerms t = ComputeQuadraticTerms(inst.problem, inst.Operator());
  const oracle::Problem& d = inst.dense;
  const oracle::Matrix r = d.frames * d.frames.transpose() / d.frames.cols();
  const oracle::Matrix hg = d.h * d.g;
  EXPECT_LE(oracle::RelativeError(t.a_r, d.g.transpose() * r * d.g), 1e-12);
  EXPECT_LE(oracle::RelativeError(t.a_h, hg.transpose() * hg), 1e-12);
  EXPECT_LE(oracle::RelativeError(t.b_r, d.g.transpose() * r * d.q), 1e-12);
  EXPECT_LE(oracle::RelativeError(
                t.b_h, hg.transpose() * (d.alpha * d.delta - d.h * d.q)),
            1e-12);
  EXPECT_NEAR(t.target_residual, (d.h * d.q - d.alpha * d.delta).squaredNorm(),
              1e-12 * (1.0 + t.target_residual));
}

TEST(SolverTest, ConjugateGradientAgreesWithCholesky) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 5; ++trial) {
    InstanceLimits limits;
    limits.mu_log10_hi = 1.0;
    const Instance inst = RandomInstance(rng, limits);
    SolverOptions chol;
    chol.kind = SolverKind::kCholesky;
    SolverOptions cg;
    cg.kind = SolverKind::kConjugateGradient;
    cg.cg_tolerance = 1e-13;
    const auto a = DesignSoft(inst.problem, inst.Operator(), chol);
    const auto b = DesignSoft(inst.problem, inst.Operator(), cg);
    EXPECT_LE(oracle::RelativeError(b.stacked(), a.stacked()), 1e-8);
  }
}

TEST(DesignRobustTest, MatchesAveragedOracleAndBeatsPerPathFilters) {
  std::mt19937_64 rng(46);
  const Instance inst = RandomInstance(rng, {});
  const int j_count = 4;
  std::vector<BlockConvOperator> ops;
  std::vector<oracle::Matrix> dense_ops;
  for (int j = 0; j < j_count; ++j) {
    std::vector<double> g = inst.g;
    for (double& x : g) x *= 1.0 + 0.2 * (j - 1.5);
    g[0] += 0.05 * j;
    ops.push_back(LatencyAwareSecondaryOperator(
        ImpulseResponse(g, 8000), inst.problem.num_blocks(),
        inst.problem.filter_length, inst.ff, inst.fb));
    dense_ops.push_back(testing_support::OracleOperator(inst, g));
  }
  const StackedControlFilter w = DesignRobust(inst.problem, ops);

  // Oracle: the averaged normal equations, solved by LU.
  const oracle::Problem& d = inst.dense;
  const oracle::Matrix r = d.frames * d.frames.transpose() / d.frames.cols();
  const int n = static_cast<int>(d.g.cols());
  oracle::Matrix lhs = d.b_diag.asDiagonal();
  oracle::Vector rhs = oracle::Vector::Zero(n);
  for (const auto& g : dense_ops) {
    const oracle::Matrix hg = d.h * g;
    lhs += (g.transpose() * r * g + d.mu * hg.transpose() * hg) / j_count;
    rhs -= (g.transpose() * r * d.q -
            d.mu * hg.transpose() * (d.alpha * d.delta - d.h * d.q)) /
           j_count;
  }
  const oracle::Vector want = lhs.fullPivLu().solve(rhs);
  EXPECT_LE(oracle::RelativeError(w.stacked(), want), 1e-9);

  const double robust = AverageCost(w, inst.problem, ops).total;
  for (const auto& op : ops) {
    const StackedControlFilter wj = DesignSoft(inst.problem, op);
    EXPECT_LE(robust, AverageCost(wj, inst.problem, ops).total);
  }
}

TEST(DesignSoftTest, ConstraintResidualNonIncreasingInMu) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = RandomInstance(rng, {});
    const BlockConvOperator op = inst.Operator();
    const QuadraticTerms terms = ComputeQuadraticTerms(inst.problem, op);
    double previous = std::numeric_limits<double>::infinity();
    for (double mu : {0.0, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
      inst.problem.mu = mu;
      const StackedControlFilter w = SolveTerms(inst.problem, terms);
      const double c = EvaluateCost(w, inst.problem, op).constraint_residual;
      EXPECT_LE(c, previous * (1.0 + 1e-9) + 1e-14);
      previous = c;
    }
  }
}

TEST(RegularizerTest, RuleScalesWithLambda) {
  const Regularizer r = RegularizerFromRule(2e4, RegularizerRule{});
  EXPECT_DOUBLE_EQ(r.beta_ff, 2.0);
  EXPECT_DOUBLE_EQ(r.beta_fb, 60.0);
  EXPECT_THROW(RegularizerFromRule(0.0, RegularizerRule{}), NumericError);
  EXPECT_THROW(RegularizerFromRule(-1.0, RegularizerRule{}), NumericError);
  RegularizerRule bad;
  bad.beta_ff_divisor = 0.0;
  EXPECT_THROW(RegularizerFromRule(1.0, bad), ArgumentError);
}

TEST(LargestEigenvalueTest, MatchesSymmetricEigensolver) {
  std::mt19937_64 rng(48);
  for (int n : {1, 5, 40, 120}) {
    const std::vector<double> xs = oracle::RandomVector(rng, n * (n + 3));
    const oracle::Matrix x =
        Eigen::Map<const oracle::Matrix>(xs.data(), n, n + 3);
    const oracle::Matrix a = x * x.transpose();
    const double want =
        Eigen::SelfAdjointEigenSolver<oracle::Matrix>(a).eigenvalues().maxCoeff();
    EXPECT_NEAR(LargestEigenvalue(a), want, 1e-9 * want);
  }
}

TEST(LargestEigenvalueTest, WorksOnFrameCorrelation) {
  std::mt19937_64 rng(49);
  InstanceLimits limits;
  limits.frame_correlation = true;
  const Instance inst = RandomInstance(rng, limits);
  const oracle::Matrix r = inst.problem.correlation->Dense();
  const double want =
      Eigen::SelfAdjointEigenSolver<oracle::Matrix>(r).eigenvalues().maxCoeff();
  EXPECT_NEAR(LargestEigenvalue(*inst.problem.correlation), want, 1e-9 * want);
}

TEST(DesignProblemTest, ValidationErrors) {
  std::mt19937_64 rng(50);
  Instance inst = RandomInstance(rng, {});
  DesignProblem p = inst.problem;
  p.regularizer.beta_ff = 0.0;
  EXPECT_THROW(p.Validate(), ArgumentError);
  p = inst.problem;
  p.delay = p.reirs.front().causal_length() + p.block_length() - 1;
  EXPECT_THROW(p.Validate(), ArgumentError);
  p = inst.problem;
  p.mu = -1.0;
  EXPECT_THROW(p.Validate(), ArgumentError);
  p = inst.problem;
  p.reirs.pop_back();
  EXPECT_THROW(p.Validate(), ArgumentError);
  const BlockConvOperator wrong = LatencyAwareSecondaryOperator(
      ImpulseResponse(inst.g, 8000), inst.problem.num_blocks(),
      inst.problem.filter_length, inst.ff + 1, inst.fb + 1);
  EXPECT_THROW(DesignSoft(inst.problem, wrong), ArgumentError);
}

TEST(StackedControlFilterTest, BlocksAndShapeChecks) {
  Vector v(6);
  v << 1, 2, 3, 4, 5, 6;
  const StackedControlFilter w(v, 3);
  EXPECT_EQ(w.filter_length(), 2);
  EXPECT_EQ(w.num_outer(), 2);
  EXPECT_EQ(w.block(2)[1], 6.0);
  EXPECT_THROW(StackedControlFilter(v, 4), ArgumentError);
  EXPECT_EQ(StackedControlFilter::Zero(2, 3).stacked().norm(), 0.0);
}

}  // namespace
}  // namespace ssanc

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

// Soft-constrained control filter design.
//
// The cost of a stacked filter w under secondary operator G is
//
//   J(w) = E{e^2} + w^T B w + mu * ||H (q + G w) - alpha * delta||^2,
//   E{e^2} = (q + G w)^T R (q + G w),
//
// where H = [H_1 ... H_{K+1}] holds the acausal ReIR convolution matrices,
// q selects the current leakage sample and delta has its unit entry at
// row L_a + delay. The robust design minimizes the mean of J over an
// ensemble of operators G_j.

#ifndef SSANC_FILTER_DESIGN_H_
#define SSANC_FILTER_DESIGN_H_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ssanc/correlation.h"
#include "ssanc/dsp_core.h"

namespace ssanc {

// w = [w_1^T ... w_{K+1}^T]^T. The first K blocks filter the outer
// microphones, the last one the leakage estimate.
class StackedControlFilter {
 public:
  StackedControlFilter(Vector stacked, int num_blocks);
  static StackedControlFilter Zero(int num_blocks, int filter_length);

  int num_blocks() const { return num_blocks_; }
  int num_outer() const { return num_blocks_ - 1; }
  int filter_length() const {
    return static_cast<int>(stacked_.size()) / num_blocks_;
  }
  const Vector& stacked() const { return stacked_; }
  std::span<const double> block(int k) const;

 private:
  Vector stacked_;
  int num_blocks_;
};

struct RegularizerRule {
  double beta_ff_divisor = 1e4;
  double beta_fb_multiplier = 30.0;

  void Validate() const;
};

struct Regularizer {
  double beta_ff = 0.0;
  double beta_fb = 0.0;
};

// beta_ff = lambda_max / divisor, beta_fb = multiplier * beta_ff.
Regularizer RegularizerFromRule(double lambda_max, const RegularizerRule& rule);

struct DesignProblem {
  std::shared_ptr<const InputCorrelation> correlation;
  // One ReIR per input channel, all with the same acausal/causal split.
  std::vector<AcausalKernel> reirs;
  int filter_length = 0;
  Regularizer regularizer;
  double mu = 1.0;
  double alpha = 1.0;
  int delay = 0;

  int num_blocks() const { return correlation->num_blocks(); }
  int block_length() const { return correlation->block_length(); }
  int acausal_length() const { return reirs.front().acausal_length; }
  int constraint_rows() const {
    return static_cast<int>(reirs.front().taps.size()) + block_length() - 1;
  }
  // Throws ArgumentError on inconsistent dimensions or parameters.
  void Validate() const;
  // Also checks that G maps num_blocks * filter_length onto R's space.
  void ValidateOperator(const BlockConvOperator& g) const;
};

Vector SelectionVector(const DesignProblem& problem);
Vector TargetVector(const DesignProblem& problem);
// Diagonal of B: beta_ff on the first K blocks, beta_fb on the last.
Vector RegularizerDiagonal(const DesignProblem& problem);
// H v for a stacked (K+1) L vector.
Vector ApplyReirOperator(const DesignProblem& problem,
                         const Eigen::Ref<const Vector>& v);

// The mu-independent pieces of the normal equations under one operator G:
//   a_r = G^T R G,    b_r = G^T R q,     q_r_q = q^T R q,
//   a_h = (HG)^T HG,  b_h = (HG)^T (alpha delta - H q),
//   target_residual = ||H q - alpha delta||^2.
struct QuadraticTerms {
  Matrix a_r;
  Matrix a_h;
  Vector b_r;
  Vector b_h;
  double q_r_q = 0.0;
  double target_residual = 0.0;
};

QuadraticTerms ComputeQuadraticTerms(const DesignProblem& problem,
                                     const BlockConvOperator& g);
// Mean of the terms, accumulated in the given order.
QuadraticTerms AverageTerms(const std::vector<QuadraticTerms>& terms);

struct NormalEquations {
  Matrix lhs;
  Vector rhs;
};

// lhs = a_r + B + mu a_h, rhs = -(b_r - mu b_h); lhs is exactly symmetric.
NormalEquations AssembleNormalEquations(const DesignProblem& problem,
                                        const QuadraticTerms& terms);
NormalEquations AssembleNormalEquations(const DesignProblem& problem,
                                        const BlockConvOperator& g);

enum class SolverKind { kAuto, kCholesky, kConjugateGradient };

struct SolverOptions {
  SolverKind kind = SolverKind::kAuto;
  // kAuto switches to conjugate gradients above this many unknowns.
  int cg_threshold = 4096;
  double cg_tolerance = 1e-11;
  int cg_max_iterations = 0;  // 0: ten times the dimension
};

Vector SolveNormalEquations(const NormalEquations& eq,
                            const SolverOptions& options = {});

StackedControlFilter SolveTerms(const DesignProblem& problem,
                                const QuadraticTerms& terms,
                                const SolverOptions& options = {});

StackedControlFilter DesignSoft(const DesignProblem& problem,
                                const BlockConvOperator& g_design,
                                const SolverOptions& options = {});

StackedControlFilter DesignRobust(const DesignProblem& problem,
                                  const std::vector<BlockConvOperator>& g_set,
                                  const SolverOptions& options = {});

struct CostBreakdown {
  double total = 0.0;
  double residual_power = 0.0;
  double regularization = 0.0;
  // mu * ||H (q + G w) - alpha delta||^2 and the unweighted norm.
  double constraint = 0.0;
  double constraint_residual = 0.0;
};

// Evaluated directly from R, B and H, independent of QuadraticTerms.
CostBreakdown EvaluateCost(const StackedControlFilter& w,
                           const DesignProblem& problem,
                           const BlockConvOperator& g_eval);
// Mean over the set of the per-operator costs.
CostBreakdown AverageCost(const StackedControlFilter& w,
                          const DesignProblem& problem,
                          const std::vector<BlockConvOperator>& g_set);

struct EigenOptions {
  double tolerance = 1e-10;
  int krylov_dim = 40;
  int max_restarts = 500;
};

// Largest eigenvalue of a symmetric positive semidefinite operator by
// restarted Lanczos iteration from a fixed start vector. Throws NumericError
// carrying the last Rayleigh quotient when the cap is hit.
double LargestEigenvalue(const std::function<Vector(const Vector&)>& apply,
                         int dim, const EigenOptions& options = {});
double LargestEigenvalue(const InputCorrelation& r,
                         const EigenOptions& options = {});
double LargestEigenvalue(const Matrix& a, const EigenOptions& options = {});

}  // namespace ssanc

#endif  // SSANC_FILTER_DESIGN_H_

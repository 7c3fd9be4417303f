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

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "ssanc/errors.h"

namespace ssanc {

StackedControlFilter::StackedControlFilter(Vector stacked, int num_blocks)
    : stacked_(std::move(stacked)), num_blocks_(num_blocks) {
  if (num_blocks_ < 1 || stacked_.size() == 0 ||
      stacked_.size() % num_blocks_ != 0) {
    throw ArgumentError(fmt::format(
        "StackedControlFilter: {} coefficients do not split into {} blocks",
        stacked_.size(), num_blocks_));
  }
  if (!stacked_.allFinite()) {
    throw ArgumentError("StackedControlFilter: coefficients must be finite");
  }
}

StackedControlFilter StackedControlFilter::Zero(int num_blocks,
                                                int filter_length) {
  return StackedControlFilter(Vector::Zero(num_blocks * filter_length),
                              num_blocks);
}

std::span<const double> StackedControlFilter::block(int k) const {
  if (k < 0 || k >= num_blocks_) {
    throw ArgumentError(fmt::format(
        "StackedControlFilter: block {} out of range [0, {})", k,
        num_blocks_));
  }
  const int len = filter_length();
  return std::span<const double>(stacked_.data() + k * len, len);
}

void RegularizerRule::Validate() const {
  if (!(beta_ff_divisor > 0.0) || !(beta_fb_multiplier > 0.0)) {
    throw ArgumentError(
        "RegularizerRule: beta_ff_divisor and beta_fb_multiplier must be > 0");
  }
}

Regularizer RegularizerFromRule(double lambda_max,
                                const RegularizerRule& rule) {
  rule.Validate();
  if (!(lambda_max > 0.0)) {
    throw NumericError(fmt::format(
        "regularizer: largest eigenvalue {} is not positive; the input "
        "signals carry no energy",
        lambda_max));
  }
  const double beta_ff = lambda_max / rule.beta_ff_divisor;
  return {beta_ff, rule.beta_fb_multiplier * beta_ff};
}

void DesignProblem::Validate() const {
  if (!correlation) throw ArgumentError("DesignProblem: missing correlation");
  if (static_cast<int>(reirs.size()) != num_blocks()) {
    throw ArgumentError(fmt::format(
        "DesignProblem: {} ReIRs for {} input channels", reirs.size(),
        num_blocks()));
  }
  for (const auto& h : reirs) {
    if (h.acausal_length != reirs.front().acausal_length ||
        h.taps.size() != reirs.front().taps.size() || h.taps.empty() ||
        h.causal_length() < 1) {
      throw ArgumentError(
          "DesignProblem: ReIRs must share one acausal/causal split");
    }
  }
  if (filter_length < 1 || filter_length > block_length()) {
    throw ArgumentError(fmt::format(
        "DesignProblem: filter_length {} incompatible with block length {}",
        filter_length, block_length()));
  }
  if (!(regularizer.beta_ff > 0.0) || !(regularizer.beta_fb > 0.0)) {
    throw ArgumentError(
        "DesignProblem: beta_ff and beta_fb must be > 0 for a unique "
        "minimizer");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw ArgumentError("DesignProblem: mu must be finite and >= 0");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ArgumentError("DesignProblem: alpha must be finite and >= 0");
  }
  const int max_delay = reirs.front().causal_length() + block_length() - 1;
  if (delay < 0 || delay >= max_delay) {
    throw ArgumentError(fmt::format(
        "DesignProblem: delay {} must lie in [0, {})", delay, max_delay));
  }
}

void DesignProblem::ValidateOperator(const BlockConvOperator& g) const {
  if (g.num_blocks() != num_blocks() || g.block_rows() != block_length() ||
      g.block_cols() != filter_length) {
    throw ArgumentError(fmt::format(
        "DesignProblem: operator maps {} blocks of {} onto {}, expected {} "
        "blocks of {} onto {}",
        g.num_blocks(), g.block_cols(), g.block_rows(), num_blocks(),
        filter_length, block_length()));
  }
}

Vector SelectionVector(const DesignProblem& problem) {
  Vector q = Vector::Zero(problem.num_blocks() * problem.block_length());
  q[(problem.num_blocks() - 1) * problem.block_length()] = 1.0;
  return q;
}

Vector TargetVector(const DesignProblem& problem) {
  Vector d = Vector::Zero(problem.constraint_rows());
  d[problem.acausal_length() + problem.delay] = 1.0;
  return d;
}

Vector RegularizerDiagonal(const DesignProblem& problem) {
  const int lw = problem.filter_length;
  Vector b(problem.num_blocks() * lw);
  b.head((problem.num_blocks() - 1) * lw).setConstant(
      problem.regularizer.beta_ff);
  b.tail(lw).setConstant(problem.regularizer.beta_fb);
  return b;
}

Vector ApplyReirOperator(const DesignProblem& problem,
                         const Eigen::Ref<const Vector>& v) {
  const int len = problem.block_length();
  if (v.size() != problem.num_blocks() * len) {
    throw ArgumentError("ApplyReirOperator: dimension mismatch");
  }
  Vector out = Vector::Zero(problem.constraint_rows());
  for (int k = 0; k < problem.num_blocks(); ++k) {
    const std::vector<double> part =
        FullConvolve(problem.reirs[k].taps,
                     std::span<const double>(v.data() + k * len, len));
    out += Eigen::Map<const Vector>(part.data(), part.size());
  }
  return out;
}

QuadraticTerms ComputeQuadraticTerms(const DesignProblem& problem,
                                     const BlockConvOperator& g) {
  problem.Validate();
  problem.ValidateOperator(g);
  const int nb = problem.num_blocks();
  const int lw = problem.filter_length;

  FilteredCorrelation f = problem.correlation->Filtered(g);
  QuadraticTerms t;
  t.a_r = std::move(f.a_r);
  t.b_r = std::move(f.b_r);
  t.q_r_q = f.q_r_q;

  // Column block k of HG is the convolution matrix of h_k * g_k.
  std::vector<std::vector<double>> hg(nb);
  for (int k = 0; k < nb; ++k) {
    hg[k] = FullConvolve(problem.reirs[k].taps, g.block(k).kernel());
  }
  t.a_h.resize(nb * lw, nb * lw);
  for (int k = 0; k < nb; ++k) {
    for (int l = k; l < nb; ++l) {
      // Entry (c, d) is C(c - d) with C(m) = sum_s a_k[s] a_l[s + m].
      const std::vector<double> c = CrossCorrelate(hg[k], hg[l]);
      const int len = static_cast<int>(hg[k].size());
      for (int ci = 0; ci < lw; ++ci) {
        for (int di = 0; di < lw; ++di) {
          // Shifts of |c - d| >= len do not overlap.
          const int m = ci - di;
          const double v = (m <= -len || m >= len) ? 0.0 : c[len - 1 + m];
          t.a_h(k * lw + ci, l * lw + di) = v;
          t.a_h(l * lw + di, k * lw + ci) = v;
        }
      }
    }
  }

  // H q is column 0 of H_{K+1}: the last ReIR placed at the top.
  Vector residual = problem.alpha * TargetVector(problem);
  const auto& last = problem.reirs.back().taps;
  for (std::size_t i = 0; i < last.size(); ++i) residual[i] -= last[i];
  t.target_residual = residual.squaredNorm();
  t.b_h.resize(nb * lw);
  for (int k = 0; k < nb; ++k) {
    t.b_h.segment(k * lw, lw) =
        ToeplitzConvOperator(hg[k], lw).ApplyTranspose(residual);
  }
  return t;
}

QuadraticTerms AverageTerms(const std::vector<QuadraticTerms>& terms) {
  if (terms.empty()) throw ArgumentError("AverageTerms: empty set");
  QuadraticTerms avg = terms.front();
  for (std::size_t j = 1; j < terms.size(); ++j) {
    const auto& t = terms[j];
    if (t.a_r.rows() != avg.a_r.rows()) {
      throw ArgumentError("AverageTerms: inconsistent dimensions");
    }
    avg.a_r += t.a_r;
    avg.a_h += t.a_h;
    avg.b_r += t.b_r;
    avg.b_h += t.b_h;
    avg.q_r_q += t.q_r_q;
    avg.target_residual += t.target_residual;
  }
  if (terms.size() > 1) {
    const double inv = 1.0 / static_cast<double>(terms.size());
    avg.a_r *= inv;
    avg.a_h *= inv;
    avg.b_r *= inv;
    avg.b_h *= inv;
    avg.q_r_q *= inv;
    avg.target_residual *= inv;
  }
  return avg;
}

NormalEquations AssembleNormalEquations(const DesignProblem& problem,
                                        const QuadraticTerms& terms) {
  problem.Validate();
  const int n = problem.num_blocks() * problem.filter_length;
  if (terms.a_r.rows() != n || terms.a_h.rows() != n ||
      terms.b_r.size() != n || terms.b_h.size() != n) {
    throw ArgumentError(fmt::format(
        "AssembleNormalEquations: terms do not match {} unknowns", n));
  }
  NormalEquations eq;
  eq.lhs = terms.a_r + problem.mu * terms.a_h;
  eq.lhs.diagonal() += RegularizerDiagonal(problem);
  eq.lhs = 0.5 * (eq.lhs + eq.lhs.transpose()).eval();
  eq.rhs = -(terms.b_r - problem.mu * terms.b_h);
  return eq;
}

NormalEquations AssembleNormalEquations(const DesignProblem& problem,
                                        const BlockConvOperator& g) {
  return AssembleNormalEquations(problem, ComputeQuadraticTerms(problem, g));
}

namespace {

Vector SolveCholesky(const NormalEquations& eq) {
  Eigen::LLT<Matrix> llt(eq.lhs);
  if (llt.info() != Eigen::Success) {
    throw NumericError(
        "design: normal equations lost positive definiteness; increase "
        "beta_ff (smaller beta_ff_divisor)");
  }
  Vector w = llt.solve(eq.rhs);
  // One step of iterative refinement.
  w += llt.solve(eq.rhs - eq.lhs * w);
  return w;
}

Vector SolveConjugateGradient(const NormalEquations& eq,
                              const SolverOptions& options) {
  const Eigen::Index n = eq.rhs.size();
  const Vector diag = eq.lhs.diagonal();
  if ((diag.array() <= 0.0).any()) {
    throw NumericError(
        "design: non-positive diagonal in normal equations; increase beta_ff");
  }
  const Vector inv_diag = diag.cwiseInverse();
  const int max_it =
      options.cg_max_iterations > 0 ? options.cg_max_iterations : 10 * n;
  const double target = options.cg_tolerance * eq.rhs.norm();
  Vector w = Vector::Zero(n);
  Vector r = eq.rhs;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_it; ++it) {
    if (r.norm() <= target) return w;
    const Vector ap = eq.lhs * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) {
      throw NumericError(
          "design: conjugate gradients met a non-positive curvature; "
          "increase beta_ff");
    }
    const double step = rz / pap;
    w += step * p;
    r -= step * ap;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  if (r.norm() <= target) return w;
  throw NumericError(fmt::format(
      "design: conjugate gradients did not converge in {} iterations "
      "(relative residual {:.3g}); increase beta_ff or use the Cholesky "
      "solver",
      max_it, r.norm() / eq.rhs.norm()));
}

}  // namespace

Vector SolveNormalEquations(const NormalEquations& eq,
                            const SolverOptions& options) {
  const Eigen::Index n = eq.rhs.size();
  if (eq.lhs.rows() != n || eq.lhs.cols() != n) {
    throw ArgumentError("SolveNormalEquations: dimension mismatch");
  }
  if (eq.rhs.isZero(0.0)) return Vector::Zero(n);
  bool use_cg = options.kind == SolverKind::kConjugateGradient;
  if (options.kind == SolverKind::kAuto) use_cg = n > options.cg_threshold;
  return use_cg ? SolveConjugateGradient(eq, options) : SolveCholesky(eq);
}

StackedControlFilter SolveTerms(const DesignProblem& problem,
                                const QuadraticTerms& terms,
                                const SolverOptions& options) {
  return StackedControlFilter(
      SolveNormalEquations(AssembleNormalEquations(problem, terms), options),
      problem.num_blocks());
}

StackedControlFilter DesignSoft(const DesignProblem& problem,
                                const BlockConvOperator& g_design,
                                const SolverOptions& options) {
  return SolveTerms(problem, ComputeQuadraticTerms(problem, g_design),
                    options);
}

StackedControlFilter DesignRobust(const DesignProblem& problem,
                                  const std::vector<BlockConvOperator>& g_set,
                                  const SolverOptions& options) {
  if (g_set.empty()) throw ArgumentError("DesignRobust: empty ensemble");
  std::vector<QuadraticTerms> terms;
  terms.reserve(g_set.size());
  for (const auto& g : g_set) terms.push_back(ComputeQuadraticTerms(problem, g));
  return SolveTerms(problem, AverageTerms(terms), options);
}

CostBreakdown EvaluateCost(const StackedControlFilter& w,
                           const DesignProblem& problem,
                           const BlockConvOperator& g_eval) {
  problem.Validate();
  problem.ValidateOperator(g_eval);
  if (w.num_blocks() != problem.num_blocks() ||
      w.filter_length() != problem.filter_length) {
    throw ArgumentError("EvaluateCost: filter shape does not match problem");
  }
  const Vector total_path = SelectionVector(problem) + g_eval.Apply(w.stacked());
  CostBreakdown c;
  c.residual_power = total_path.dot(problem.correlation->Apply(total_path));
  c.regularization =
      w.stacked().dot(RegularizerDiagonal(problem).cwiseProduct(w.stacked()));
  c.constraint_residual =
      (ApplyReirOperator(problem, total_path) -
       problem.alpha * TargetVector(problem))
          .squaredNorm();
  c.constraint = problem.mu * c.constraint_residual;
  c.total = c.residual_power + c.regularization + c.constraint;
  return c;
}

CostBreakdown AverageCost(const StackedControlFilter& w,
                          const DesignProblem& problem,
                          const std::vector<BlockConvOperator>& g_set) {
  if (g_set.empty()) throw ArgumentError("AverageCost: empty ensemble");
  CostBreakdown avg;
  for (const auto& g : g_set) {
    const CostBreakdown c = EvaluateCost(w, problem, g);
    avg.total += c.total;
    avg.residual_power += c.residual_power;
    avg.regularization += c.regularization;
    avg.constraint += c.constraint;
    avg.constraint_residual += c.constraint_residual;
  }
  const double inv = 1.0 / static_cast<double>(g_set.size());
  avg.total *= inv;
  avg.residual_power *= inv;
  avg.regularization *= inv;
  avg.constraint *= inv;
  avg.constraint_residual *= inv;
  return avg;
}

double LargestEigenvalue(const std::function<Vector(const Vector&)>& apply,
                         int dim, const EigenOptions& options) {
  if (dim < 1) throw ArgumentError("LargestEigenvalue: dimension must be >= 1");
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = 1.0 + 0.5 * std::sin(1.0 + i);
  v.normalize();

  const int m_max = std::min(options.krylov_dim, dim);
  double theta = 0.0;
  for (int restart = 0; restart < options.max_restarts; ++restart) {
    Matrix basis(dim, m_max);
    std::vector<double> diag;
    std::vector<double> off;
    basis.col(0) = v;
    double beta_last = 0.0;
    double scale = 0.0;
    int m = 0;
    for (int j = 0; j < m_max; ++j) {
      Vector w = apply(basis.col(j));
      if (w.size() != dim) {
        throw ArgumentError("LargestEigenvalue: operator changed dimension");
      }
      const double a = basis.col(j).dot(w);
      diag.push_back(a);
      scale = std::max(scale, w.norm());
      // Full reorthogonalization, twice for safety.
      for (int pass = 0; pass < 2; ++pass) {
        const Vector coeff = basis.leftCols(j + 1).transpose() * w;
        w -= basis.leftCols(j + 1) * coeff;
      }
      m = j + 1;
      beta_last = w.norm();
      if (beta_last <= 1e-14 * std::max(scale, 1e-300) || j + 1 == m_max) {
        break;
      }
      off.push_back(beta_last);
      basis.col(j + 1) = w / beta_last;
    }
    Matrix t = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = diag[i];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = off[i];
    Eigen::SelfAdjointEigenSolver<Matrix> eig(t);
    const int top = m - 1;
    theta = eig.eigenvalues()[top];
    const Vector y = eig.eigenvectors().col(top);
    const bool invariant = beta_last <= 1e-14 * std::max(scale, 1e-300);
    const double residual = invariant ? 0.0 : std::abs(beta_last * y[top]);
    if (residual <= options.tolerance * std::abs(theta)) return theta;
    v = basis.leftCols(m) * y;
    v.normalize();
  }
  throw NumericError(fmt::format(
      "LargestEigenvalue: no convergence after {} restarts; last Rayleigh "
      "quotient {}",
      options.max_restarts, theta));
}

double LargestEigenvalue(const InputCorrelation& r,
                         const EigenOptions& options) {
  return LargestEigenvalue(
      [&r](const Vector& v) { return r.Apply(v); }, r.dim(), options);
}

double LargestEigenvalue(const Matrix& a, const EigenOptions& options) {
  if (a.rows() != a.cols()) {
    throw ArgumentError("LargestEigenvalue: matrix must be square");
  }
  return LargestEigenvalue([&a](const Vector& v) { return Vector(a * v); },
                           static_cast<int>(a.rows()), options);
}

}  // namespace ssanc

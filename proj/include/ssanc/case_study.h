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

// The three-case mismatch study over a mu grid.
//
//   matched     design on path j, evaluate with g_true = g_hat = path j
//   mismatched  design on path j, evaluate with g_true = path i != j and the
//               internal estimate g_hat = path j
//   robust      one filter from the ensemble-averaged cost, evaluated with
//               g_true = path i and g_hat = the ensemble mean path

#ifndef SSANC_CASE_STUDY_H_
#define SSANC_CASE_STUDY_H_

#include <functional>
#include <string>
#include <vector>

#include "ssanc/closed_loop_sim.h"
#include "ssanc/filter_design.h"
#include "ssanc/metrics.h"
#include "ssanc/path_model.h"
#include "ssanc/scenario.h"

namespace ssanc {

struct DesignParams {
  int filter_length = 1800;
  int path_length = 1800;
  int reir_acausal_length = 4500;
  int reir_causal_length = 4500;
  int delay = 240;
  double alpha = 2.0;
  RegularizerRule rule;
  int reference_mic = 0;
  int correlation_hop = 1;
  // R is held densely up to this dimension, as a frame operator above.
  int dense_threshold = 4096;
  SolverOptions solver;
};

enum class CaseKind { kMatched, kMismatched, kRobust };

const char* CaseName(CaseKind kind);
CaseKind ParseCaseName(const std::string& name);

// n points from lo to hi, equally spaced in log10; the ends are exact.
std::vector<double> LogSpacedGrid(double lo, double hi, int n);

struct CaseStudyConfig {
  DesignParams design;
  LoopConfig loop;
  std::vector<double> mu_grid;
  std::vector<CaseKind> cases = {CaseKind::kMatched, CaseKind::kMismatched,
                                 CaseKind::kRobust};
  double percentile_low = 5.0;
  double percentile_high = 95.0;
  int workers = 1;

  // Throws ConfigError.
  void Validate() const;
};

// Everything a single design needs apart from mu and the path.
struct DesignContext {
  DesignProblem problem;
  double lambda_max = 0.0;
  int ff_latency = 0;
  int fb_latency = 0;

  // The design-time operator with processing latencies folded in.
  BlockConvOperator Operator(const ImpulseResponse& g) const;
};

DesignContext PrepareDesign(const CaseStudyConfig& cfg,
                            const SyntheticScenario& scenario,
                            int path_length);

struct RunMetrics {
  double nr_db = 0.0;
  double sd_db = 0.0;
  bool stable = true;
};

RunMetrics EvaluateRun(const StackedControlFilter& w,
                       const ImpulseResponse& g_true,
                       const ImpulseResponse& g_hat,
                       const SyntheticScenario& scenario,
                       const CaseStudyConfig& cfg, const BandAnalysis& bands);

struct CaseRow {
  CaseKind kind;
  double mu;
  std::string design_path;
  std::string eval_path;
  double nr_db;
  double sd_db;
  bool stable;
};

struct CaseAggregate {
  CaseKind kind;
  double mu;
  std::string metric;  // "nr_db" or "sd_db"
  double mean;         // NaN when no stable run exists
  double p_low;
  double p_high;
  int n_runs;
  int n_unstable;
  bool degenerate;     // more than half of the runs unstable
};

struct CaseReport {
  std::vector<double> mu_grid;
  std::vector<CaseKind> cases;
  double percentile_low = 5.0;
  double percentile_high = 95.0;
  std::vector<CaseRow> rows;
  std::vector<CaseAggregate> aggregates;
  bool degenerate = false;
  double lambda_max = 0.0;
  Regularizer regularizer;
  std::string band_table_version;
  int ensemble_size = 0;
};

// Linear interpolation between order statistics, h = (n - 1) p / 100.
double Percentile(std::vector<double> values, double p);

CaseReport RunCases(const CaseStudyConfig& cfg,
                    const SyntheticScenario& scenario,
                    const PathEnsemble& ensemble);

// Writes rows.csv, aggregates.csv, plot_nr_db.csv, plot_sd_db.csv and
// report.json into out_dir.
void EmitReport(const CaseReport& report, const std::string& out_dir);

struct AggregateTable {
  std::vector<CaseAggregate> aggregates;
  double percentile_low = 5.0;
  double percentile_high = 95.0;
};

// Reads an aggregates.csv written by EmitReport.
AggregateTable ReadAggregatesCsv(const std::string& path);
// Per-metric plot series (log10 mu, mean and percentile band per case).
void WritePlotData(const AggregateTable& table, const std::string& out_dir);

// Calls fn(i) for i in [0, n) on up to `workers` threads. The first
// exception (lowest index) is rethrown after all threads finish.
void ParallelFor(int n, int workers, const std::function<void(int)>& fn);

}  // namespace ssanc

#endif  // SSANC_CASE_STUDY_H_

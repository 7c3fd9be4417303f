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

#include "ssanc/case_study.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"
#include "ssanc/errors.h"

namespace ssanc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kMetrics[] = {"nr_db", "sd_db"};

std::string Num(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{}", v);
}

double ParseNum(const std::string& s, const std::string& where) {
  if (s.empty()) return kNaN;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(fmt::format("{}: '{}' is not a number", where, s));
  }
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError(fmt::format("{}: cannot open for writing", path.string()));
  }
  return out;
}

struct Task {
  CaseKind kind;
  int mu_index;
  int design;  // -1 for the robust filter
  int eval;
};

}  // namespace

const char* CaseName(CaseKind kind) {
  switch (kind) {
    case CaseKind::kMatched:
      return "matched";
    case CaseKind::kMismatched:
      return "mismatched";
    case CaseKind::kRobust:
      return "robust";
  }
  return "unknown";
}

CaseKind ParseCaseName(const std::string& name) {
  if (name == "matched") return CaseKind::kMatched;
  if (name == "mismatched") return CaseKind::kMismatched;
  if (name == "robust") return CaseKind::kRobust;
  throw ConfigError(fmt::format(
      "unknown case '{}'; expected matched, mismatched or robust", name));
}

std::vector<double> LogSpacedGrid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
    throw ConfigError("mu grid: need 0 < mu_min <= mu_max and >= 1 point");
  }
  if (n == 1) return {lo};
  std::vector<double> grid(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) {
    grid[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

void CaseStudyConfig::Validate() const {
  if (mu_grid.empty()) throw ConfigError("study: mu grid is empty");
  for (double mu : mu_grid) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
      throw ConfigError(fmt::format("study: mu {} is not a positive value",
                                    mu));
    }
  }
  if (cases.empty()) throw ConfigError("study: no case selected");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (std::size_t j = i + 1; j < cases.size(); ++j) {
      if (cases[i] == cases[j]) {
        throw ConfigError(fmt::format("study: case '{}' selected twice",
                                      CaseName(cases[i])));
      }
    }
  }
  if (!(percentile_low > 0.0) || !(percentile_high < 100.0) ||
      !(percentile_low < percentile_high)) {
    throw ConfigError(
        "study: percentiles must satisfy 0 < low < high < 100");
  }
  if (workers < 1) throw ConfigError("study: workers must be >= 1");
  const DesignParams& d = design;
  if (d.filter_length < 1 || d.path_length < 1 || d.reir_acausal_length < 0 ||
      d.reir_causal_length < 1 || d.delay < 0 || d.correlation_hop < 1 ||
      d.dense_threshold < 0) {
    throw ConfigError("design: lengths, delay and hop out of range");
  }
  if (!(d.alpha > 0.0)) throw ConfigError("design: alpha must be > 0");
  const int block = d.path_length + std::max(loop.ff_latency, loop.fb_latency) +
                    d.filter_length - 1;
  if (d.delay >= d.reir_causal_length + block - 1) {
    throw ConfigError(fmt::format(
        "design: delay {} must be below reir_causal_length + {}", d.delay,
        block - 1));
  }
  try {
    d.rule.Validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  loop.Validate();
}

BlockConvOperator DesignContext::Operator(const ImpulseResponse& g) const {
  return LatencyAwareSecondaryOperator(g, problem.num_blocks(),
                                       problem.filter_length, ff_latency,
                                       fb_latency);
}

DesignContext PrepareDesign(const CaseStudyConfig& cfg,
                            const SyntheticScenario& scenario,
                            int path_length) {
  const DesignParams& d = cfg.design;
  const ScenarioSignals& s = scenario.signals;
  s.Validate();
  const int k = s.num_outer();
  if (path_length != d.path_length) {
    throw ConfigError(fmt::format(
        "design: path_length is {} but the secondary paths have {} taps",
        d.path_length, path_length));
  }
  if (d.reference_mic < 0 || d.reference_mic >= k) {
    throw ConfigError(fmt::format(
        "design: reference_mic {} must be an outer mic in [0, {})",
        d.reference_mic, k));
  }
  if (static_cast<int>(scenario.speech_irs.size()) != k + 1) {
    throw ConfigError(fmt::format(
        "design: scenario has {} speech impulse responses, expected {}",
        scenario.speech_irs.size(), k + 1));
  }
  const int latency = std::max(cfg.loop.ff_latency, cfg.loop.fb_latency);
  const int block = path_length + latency + d.filter_length - 1;

  std::vector<std::vector<double>> inputs = s.outer_mics.channels();
  inputs.push_back(s.Leakage());
  DesignContext ctx{DesignProblem{}, 0.0, cfg.loop.ff_latency,
                    cfg.loop.fb_latency};
  ctx.problem.correlation = BuildInputCorrelation(
      inputs, block, d.correlation_hop, d.dense_threshold);
  ctx.lambda_max = LargestEigenvalue(*ctx.problem.correlation);
  ctx.problem.regularizer = RegularizerFromRule(ctx.lambda_max, d.rule);
  ctx.problem.reirs =
      IdentifyReirSet(scenario.speech_irs, d.reference_mic,
                      d.reir_acausal_length, d.reir_causal_length);
  ctx.problem.filter_length = d.filter_length;
  ctx.problem.alpha = d.alpha;
  ctx.problem.delay = d.delay;
  ctx.problem.mu = cfg.mu_grid.empty() ? 1.0 : cfg.mu_grid.front();
  try {
    ctx.problem.Validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  return ctx;
}

RunMetrics EvaluateRun(const StackedControlFilter& w,
                       const ImpulseResponse& g_true,
                       const ImpulseResponse& g_hat,
                       const SyntheticScenario& scenario,
                       const CaseStudyConfig& cfg, const BandAnalysis& bands) {
  const ScenarioSignals& s = scenario.signals;
  const ComponentOutput out =
      SimulateComponents(w, g_true, g_hat, s, cfg.loop);
  if (!out.stable) return {kNaN, kNaN, false};
  RunMetrics m;
  m.nr_db = NoiseReductionDb(s.leakage_noise, out.e_v);
  m.sd_db = SdIntelligDb(out.e_s, s.outer_speech.channel(cfg.design.reference_mic),
                         cfg.design.alpha, cfg.design.delay, bands,
                         s.sample_rate());
  return m;
}

double Percentile(std::vector<double> values, double p) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
}

void ParallelFor(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int threads = std::min(std::max(workers, 1), n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

CaseReport RunCases(const CaseStudyConfig& cfg,
                    const SyntheticScenario& scenario,
                    const PathEnsemble& ensemble) {
  cfg.Validate();
  ensemble.Validate();
  const DesignContext ctx = PrepareDesign(cfg, scenario, ensemble.path_length());
  const BandAnalysis bands = DefaultBandAnalysis();
  const int n_paths = ensemble.size();
  const int n_mu = static_cast<int>(cfg.mu_grid.size());
  auto selected = [&](CaseKind k) {
    return std::find(cfg.cases.begin(), cfg.cases.end(), k) != cfg.cases.end();
  };
  const bool per_path =
      selected(CaseKind::kMatched) || selected(CaseKind::kMismatched);
  const bool robust = selected(CaseKind::kRobust);

  std::vector<BlockConvOperator> ops;
  ops.reserve(n_paths);
  for (const auto& v : ensemble.variants) ops.push_back(ctx.Operator(v));
  std::vector<QuadraticTerms> terms(n_paths);
  ParallelFor(n_paths, cfg.workers, [&](int j) {
    terms[j] = ComputeQuadraticTerms(ctx.problem, ops[j]);
  });
  QuadraticTerms robust_terms;
  if (robust) robust_terms = AverageTerms(terms);

  // filters[m * (J + 1) + j], slot J is the robust filter.
  const int stride = n_paths + 1;
  std::vector<std::optional<StackedControlFilter>> filters(n_mu * stride);
  ParallelFor(n_mu * stride, cfg.workers, [&](int idx) {
    const int m = idx / stride;
    const int j = idx % stride;
    if (j < n_paths && !per_path) return;
    if (j == n_paths && !robust) return;
    DesignProblem problem = ctx.problem;
    problem.mu = cfg.mu_grid[m];
    filters[idx] = SolveTerms(problem, j < n_paths ? terms[j] : robust_terms,
                              cfg.design.solver);
  });

  std::vector<Task> tasks;
  static constexpr CaseKind kOrder[] = {CaseKind::kMatched,
                                        CaseKind::kMismatched,
                                        CaseKind::kRobust};
  for (CaseKind kind : kOrder) {
    if (!selected(kind)) continue;
    for (int m = 0; m < n_mu; ++m) {
      if (kind == CaseKind::kMatched) {
        for (int j = 0; j < n_paths; ++j) tasks.push_back({kind, m, j, j});
      } else if (kind == CaseKind::kMismatched) {
        for (int j = 0; j < n_paths; ++j) {
          for (int i = 0; i < n_paths; ++i) {
            if (i != j) tasks.push_back({kind, m, j, i});
          }
        }
      } else {
        for (int i = 0; i < n_paths; ++i) tasks.push_back({kind, m, -1, i});
      }
    }
  }

  const ImpulseResponse mean_path = ensemble.Mean();
  std::vector<RunMetrics> results(tasks.size());
  ParallelFor(static_cast<int>(tasks.size()), cfg.workers, [&](int t) {
    const Task& task = tasks[t];
    const int slot = task.mu_index * stride +
                     (task.design < 0 ? n_paths : task.design);
    const ImpulseResponse& g_hat =
        task.design < 0 ? mean_path : ensemble.variants[task.design];
    results[t] = EvaluateRun(*filters[slot], ensemble.variants[task.eval],
                             g_hat, scenario, cfg, bands);
  });

  CaseReport report;
  report.mu_grid = cfg.mu_grid;
  for (CaseKind kind : kOrder) {
    if (selected(kind)) report.cases.push_back(kind);
  }
  report.percentile_low = cfg.percentile_low;
  report.percentile_high = cfg.percentile_high;
  report.lambda_max = ctx.lambda_max;
  report.regularizer = ctx.problem.regularizer;
  report.band_table_version = bands.table_version;
  report.ensemble_size = n_paths;
  report.rows.reserve(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Task& task = tasks[t];
    report.rows.push_back(
        {task.kind, cfg.mu_grid[task.mu_index],
         task.design < 0 ? std::string("robust")
                         : ensemble.labels[task.design],
         ensemble.labels[task.eval], results[t].nr_db, results[t].sd_db,
         results[t].stable});
  }

  for (CaseKind kind : report.cases) {
    for (int m = 0; m < n_mu; ++m) {
      for (const char* metric : kMetrics) {
        std::vector<double> values;
        int runs = 0;
        int unstable = 0;
        for (std::size_t t = 0; t < tasks.size(); ++t) {
          if (tasks[t].kind != kind || tasks[t].mu_index != m) continue;
          ++runs;
          if (!results[t].stable) {
            ++unstable;
            continue;
          }
          values.push_back(std::string(metric) == "nr_db" ? results[t].nr_db
                                                          : results[t].sd_db);
        }
        double mean = kNaN;
        if (!values.empty()) {
          double sum = 0.0;
          for (double v : values) sum += v;
          mean = sum / values.size();
        }
        const bool degenerate = runs > 0 && 2 * unstable > runs;
        report.degenerate = report.degenerate || degenerate;
        report.aggregates.push_back(
            {kind, cfg.mu_grid[m], metric, mean,
             Percentile(values, cfg.percentile_low),
             Percentile(values, cfg.percentile_high), runs, unstable,
             degenerate});
      }
    }
  }
  return report;
}

void WritePlotData(const AggregateTable& table, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError(fmt::format("{}: cannot create directory: {}", out_dir,
                              ec.message()));
  }
  std::vector<CaseKind> cases;
  std::vector<double> mus;
  for (const auto& a : table.aggregates) {
    if (std::find(cases.begin(), cases.end(), a.kind) == cases.end()) {
      cases.push_back(a.kind);
    }
    if (std::find(mus.begin(), mus.end(), a.mu) == mus.end()) {
      mus.push_back(a.mu);
    }
  }
  const std::string lo = fmt::format("p{}", table.percentile_low);
  const std::string hi = fmt::format("p{}", table.percentile_high);
  for (const char* metric : kMetrics) {
    std::ofstream out =
        OpenOut(std::filesystem::path(out_dir) /
                fmt::format("plot_{}.csv", metric));
    out << "log10_mu,mu";
    for (CaseKind k : cases) {
      out << "," << CaseName(k) << "_mean," << CaseName(k) << "_" << lo << ","
          << CaseName(k) << "_" << hi;
    }
    out << "\n";
    for (double mu : mus) {
      out << Num(std::log10(mu)) << "," << Num(mu);
      for (CaseKind k : cases) {
        const CaseAggregate* found = nullptr;
        for (const auto& a : table.aggregates) {
          if (a.kind == k && a.mu == mu && a.metric == metric) found = &a;
        }
        if (found) {
          out << "," << Num(found->mean) << "," << Num(found->p_low) << ","
              << Num(found->p_high);
        } else {
          out << ",,,";
        }
      }
      out << "\n";
    }
    if (!out) throw IoError(fmt::format("{}: write failed", out_dir));
  }
}

void EmitReport(const CaseReport& report, const std::string& out_dir) {
  if (report.cases.empty()) {
    throw ArgumentError("EmitReport: no case selected");
  }
  if (report.aggregates.empty()) {
    throw ArgumentError("EmitReport: report is empty");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError(fmt::format("{}: cannot create directory: {}", out_dir,
                              ec.message()));
  }
  const std::filesystem::path root(out_dir);
  {
    std::ofstream out = OpenOut(root / "rows.csv");
    out << "case,mu,design_path,eval_path,nr_db,sd_db,stable,pesq,estoi\n";
    for (const auto& r : report.rows) {
      out << CaseName(r.kind) << "," << Num(r.mu) << "," << r.design_path
          << "," << r.eval_path << "," << Num(r.nr_db) << "," << Num(r.sd_db)
          << "," << (r.stable ? 1 : 0) << ",,\n";
    }
    if (!out) throw IoError("rows.csv: write failed");
  }
  {
    std::ofstream out = OpenOut(root / "aggregates.csv");
    out << fmt::format(
        "case,mu,metric,mean,p{},p{},n_runs,n_unstable,degenerate\n",
        report.percentile_low, report.percentile_high);
    for (const auto& a : report.aggregates) {
      out << CaseName(a.kind) << "," << Num(a.mu) << "," << a.metric << ","
          << Num(a.mean) << "," << Num(a.p_low) << "," << Num(a.p_high) << ","
          << a.n_runs << "," << a.n_unstable << "," << (a.degenerate ? 1 : 0)
          << "\n";
    }
    if (!out) throw IoError("aggregates.csv: write failed");
  }
  WritePlotData({report.aggregates, report.percentile_low,
                 report.percentile_high},
                out_dir);

  nlohmann::ordered_json j;
  j["format"] = "ssanc-case-report";
  j["version"] = 1;
  j["band_table_version"] = report.band_table_version;
  j["lambda_max"] = report.lambda_max;
  j["beta_ff"] = report.regularizer.beta_ff;
  j["beta_fb"] = report.regularizer.beta_fb;
  j["mu_grid"] = report.mu_grid;
  std::vector<std::string> names;
  for (CaseKind k : report.cases) names.push_back(CaseName(k));
  j["cases"] = names;
  j["ensemble_size"] = report.ensemble_size;
  j["percentiles"] = {report.percentile_low, report.percentile_high};
  j["percentile_method"] = "linear interpolation, h = (n - 1) p / 100";
  j["unstable_policy"] = "excluded from aggregates and counted";
  j["reserved_columns"] = {"pesq", "estoi"};
  j["degenerate"] = report.degenerate;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& a : report.aggregates) {
    if (a.degenerate && a.metric == "nr_db") {
      cells.push_back({{"case", CaseName(a.kind)}, {"mu", a.mu}});
    }
  }
  j["degenerate_cells"] = cells;
  j["files"] = {"rows.csv", "aggregates.csv", "plot_nr_db.csv",
                "plot_sd_db.csv"};
  std::ofstream out = OpenOut(root / "report.json");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("report.json: write failed");
}

AggregateTable ReadAggregatesCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("{}: cannot open", path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(fmt::format("{}: empty", path));
  const std::vector<std::string> header = SplitCsv(line);
  if (header.size() != 9 || header[0] != "case" || header[4].empty() ||
      header[4][0] != 'p' || header[5].empty() || header[5][0] != 'p') {
    throw IoError(fmt::format("{}: unexpected aggregates header", path));
  }
  AggregateTable table;
  table.percentile_low = ParseNum(header[4].substr(1), path);
  table.percentile_high = ParseNum(header[5].substr(1), path);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsv(line);
    const std::string where = fmt::format("{} line {}", path, line_no);
    if (f.size() != 9) {
      throw IoError(fmt::format("{}: expected 9 fields", where));
    }
    CaseAggregate a;
    try {
      a.kind = ParseCaseName(f[0]);
    } catch (const ConfigError& e) {
      throw IoError(fmt::format("{}: {}", where, e.what()));
    }
    a.mu = ParseNum(f[1], where);
    a.metric = f[2];
    a.mean = ParseNum(f[3], where);
    a.p_low = ParseNum(f[4], where);
    a.p_high = ParseNum(f[5], where);
    a.n_runs = static_cast<int>(ParseNum(f[6], where));
    a.n_unstable = static_cast<int>(ParseNum(f[7], where));
    a.degenerate = f[8] == "1";
    table.aggregates.push_back(a);
  }
  return table;
}

}  // namespace ssanc

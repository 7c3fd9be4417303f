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

// Acceptance harness: one line per criterion, non-zero exit if any fails.
//
//   acceptance_test [path/to/ssanc]
//
// The CLI path defaults to the one baked in at build time.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "instance.h"
#include "oracle.h"
#include "ssanc/case_study.h"
#include "ssanc/closed_loop_sim.h"
#include "ssanc/config.h"
#include "ssanc/dsp_core.h"
#include "ssanc/filter_design.h"
#include "ssanc/metrics.h"
#include "ssanc/scenario.h"

namespace {

namespace fs = std::filesystem;
using ssanc::BlockConvOperator;
using ssanc::CaseKind;
using ssanc::StackedControlFilter;
using ssanc::Vector;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

Vector ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// The desk-scale scene, ensemble and study, shared by several criteria.
struct Desk {
  ssanc::Settings settings;
  ssanc::SyntheticScenario scenario;
  ssanc::PathEnsemble ensemble;
  ssanc::DesignContext ctx;
  std::vector<BlockConvOperator> ops;
  std::vector<ssanc::QuadraticTerms> terms;
  ssanc::QuadraticTerms robust_terms;
  std::optional<ssanc::CaseReport> report;
  double study_seconds = 0.0;
};

Desk& GetDesk() {
  static Desk desk = [] {
    ssanc::Settings s = ssanc::DeskScalePreset();
    s.Finalize();
    ssanc::SyntheticScenario scene = ssanc::GenerateSyntheticScenario(s.scene);
    ssanc::PathEnsemble ens = ssanc::GeneratePathEnsemble(
        scene.secondary_path, s.variation, s.ensemble_size);
    ssanc::DesignContext ctx =
        ssanc::PrepareDesign(s.study, scene, ens.path_length());
    Desk d{s, std::move(scene), std::move(ens), std::move(ctx), {}, {}, {}, {}, 0.0};
    for (const auto& g : d.ensemble.variants) {
      d.ops.push_back(d.ctx.Operator(g));
      d.terms.push_back(ssanc::ComputeQuadraticTerms(d.ctx.problem, d.ops.back()));
    }
    d.robust_terms = ssanc::AverageTerms(d.terms);
    return d;
  }();
  return desk;
}

const ssanc::CaseReport& GetReport() {
  Desk& d = GetDesk();
  if (!d.report) {
    const auto start = std::chrono::steady_clock::now();
    d.report = ssanc::RunCases(d.settings.study, d.scenario, d.ensemble);
    d.study_seconds = Seconds(start);
  }
  return *d.report;
}

const ssanc::CaseAggregate& Aggregate(const ssanc::CaseReport& r, CaseKind k,
                                      double mu, const std::string& metric) {
  for (const auto& a : r.aggregates) {
    if (a.kind == k && a.mu == mu && a.metric == metric) return a;
  }
  throw std::runtime_error("missing aggregate");
}

ssanc::DesignProblem AtMu(double mu) {
  ssanc::DesignProblem p = GetDesk().ctx.problem;
  p.mu = mu;
  return p;
}

// ---------------------------------------------------------------------------

Outcome OperatorCorrectness() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> dim(1, 64);
  std::uniform_int_distribution<int> kind(0, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int which = trial < 3 ? trial : kind(rng);
    if (which == 0) {
      // Single Toeplitz convolution matrix.
      const std::vector<double> h = oracle::RandomVector(rng, dim(rng));
      const int cols = dim(rng);
      const ssanc::ToeplitzConvOperator op(h, cols);
      const oracle::Matrix m = oracle::ConvMatrix(h, cols);
      const Vector v = ToVector(oracle::RandomVector(rng, cols));
      const Vector u = ToVector(oracle::RandomVector(rng, m.rows()));
      worst = std::max({worst, oracle::RelativeError(op.Dense(), m),
                        oracle::RelativeError(op.Apply(v), m * v),
                        oracle::RelativeError(op.ApplyTranspose(u),
                                              m.transpose() * u)});
    } else if (which == 1) {
      // Latency-aware block-diagonal secondary operator.
      std::uniform_int_distribution<int> blocks(2, 4);
      std::uniform_int_distribution<int> lat(0, 5);
      const int nb = blocks(rng);
      const int cols = std::uniform_int_distribution<int>(1, 64 / nb)(rng);
      const int ff = lat(rng);
      const int fb = 1 + lat(rng);
      const int lg = std::uniform_int_distribution<int>(1, 64 - std::max(ff, fb))(rng);
      const std::vector<double> g = oracle::RandomVector(rng, lg);
      const BlockConvOperator op = ssanc::LatencyAwareSecondaryOperator(
          ssanc::ImpulseResponse(g, 8000), nb, cols, ff, fb);
      const oracle::Matrix m = oracle::SecondaryMatrix(g, nb, cols, ff, fb);
      const Vector v = ToVector(oracle::RandomVector(rng, m.cols()));
      const Vector u = ToVector(oracle::RandomVector(rng, m.rows()));
      worst = std::max({worst, oracle::RelativeError(op.Dense(), m),
                        oracle::RelativeError(op.Apply(v), m * v),
                        oracle::RelativeError(op.ApplyTranspose(u),
                                              m.transpose() * u)});
    } else {
      // Stacked ReIR operator H.
      std::mt19937_64 sub(rng());
      testing_support::InstanceLimits limits;
      const testing_support::Instance inst = testing_support::RandomInstance(sub, limits);
      const Vector v = ToVector(oracle::RandomVector(rng, inst.dense.h.cols()));
      worst = std::max(worst,
                       oracle::RelativeError(ssanc::ApplyReirOperator(inst.problem, v),
                                             inst.dense.h * v));
    }
  }
  const double t = Seconds(start);
  return {worst <= 1e-12 && t < 5.0,
          fmt::format("200 instances, max rel err {:.2e} (<= 1e-12), {:.2f} s (< 5 s)",
                      worst, t)};
}

Outcome ClosedFormCorrectness() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    testing_support::InstanceLimits limits;
    limits.frame_correlation = trial % 2 == 1;
    const testing_support::Instance inst = testing_support::RandomInstance(rng, limits);
    const StackedControlFilter w = ssanc::DesignSoft(inst.problem, inst.Operator());
    worst = std::max(worst, oracle::RelativeError(
                                w.stacked(), oracle::SolveLeastSquares(inst.dense)));
  }
  const double t = Seconds(start);
  return {worst <= 1e-9 && t < 10.0,
          fmt::format("50 instances vs least-squares oracle, max rel err {:.2e} "
                      "(<= 1e-9), {:.2f} s (< 10 s)",
                      worst, t)};
}

Outcome Stationarity() {
  std::mt19937_64 rng(1003);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const testing_support::Instance inst = testing_support::RandomInstance(rng, {});
    const StackedControlFilter w = ssanc::DesignSoft(inst.problem, inst.Operator());
    const double cost = oracle::Cost(inst.dense, w.stacked());
    const oracle::Vector grad = oracle::NumericGradient(inst.dense, w.stacked(), 1e-4);
    worst = std::max(worst, grad.cwiseAbs().maxCoeff() / (1.0 + cost));
  }
  return {worst <= 1e-5,
          fmt::format("20 instances, max |grad| / (1 + cost) = {:.2e} (<= 1e-5)", worst)};
}

Outcome RobustOptimality() {
  Desk& d = GetDesk();
  std::mt19937_64 rng(1004);
  int violations = 0;
  double min_margin_paths = std::numeric_limits<double>::infinity();
  double min_margin_random = std::numeric_limits<double>::infinity();
  for (double mu : d.settings.study.mu_grid) {
    const ssanc::DesignProblem p = AtMu(mu);
    const StackedControlFilter w = ssanc::SolveTerms(p, d.robust_terms);
    const double robust = ssanc::AverageCost(w, p, d.ops).total;
    for (const auto& t : d.terms) {
      const double c = ssanc::AverageCost(ssanc::SolveTerms(p, t), p, d.ops).total;
      if (robust > c * (1.0 + 1e-12)) ++violations;
      min_margin_paths = std::min(min_margin_paths, (c - robust) / robust);
    }
    const double scale = w.stacked().norm() / std::sqrt(w.stacked().size());
    for (int c = 0; c < 100 / static_cast<int>(d.settings.study.mu_grid.size()) + 1; ++c) {
      // Perturbations of the optimum at several scales plus plain draws.
      const double s = std::pow(10.0, std::uniform_real_distribution<double>(-3, 1)(rng));
      Vector cand = ToVector(oracle::RandomVector(rng, w.stacked().size(), s * scale));
      if (c % 3 != 0) cand += w.stacked();
      const double cost =
          ssanc::AverageCost(StackedControlFilter(cand, p.num_blocks()), p, d.ops).total;
      if (!(robust < cost)) ++violations;
      min_margin_random = std::min(min_margin_random, (cost - robust) / robust);
    }
  }
  return {violations == 0,
          fmt::format("J = {}, {} mu values, {} violations; min rel margin vs "
                      "per-path {:.3e}, vs random {:.3e}",
                      d.ensemble.size(), d.settings.study.mu_grid.size(), violations,
                      min_margin_paths, min_margin_random)};
}

Outcome MatchedDominance() {
  Desk& d = GetDesk();
  const ssanc::CaseReport& r = GetReport();
  int bad_nr = 0;
  int bad_cost = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (double mu : d.settings.study.mu_grid) {
    const double m1 = Aggregate(r, CaseKind::kMatched, mu, "nr_db").mean;
    const double m2 = Aggregate(r, CaseKind::kMismatched, mu, "nr_db").mean;
    if (!(m1 >= m2)) ++bad_nr;
    min_gap = std::min(min_gap, m1 - m2);
    const ssanc::DesignProblem p = AtMu(mu);
    std::vector<StackedControlFilter> filters;
    for (const auto& t : d.terms) filters.push_back(ssanc::SolveTerms(p, t));
    for (std::size_t i = 0; i < d.ops.size(); ++i) {
      const double own = ssanc::EvaluateCost(filters[i], p, d.ops[i]).total;
      for (std::size_t j = 0; j < d.ops.size(); ++j) {
        if (j == i) continue;
        const double other = ssanc::EvaluateCost(filters[j], p, d.ops[i]).total;
        if (own > other * (1.0 + 1e-12)) ++bad_cost;
      }
    }
  }
  return {bad_nr == 0 && bad_cost == 0,
          fmt::format("{} mu values: min mean NR gap (case 1 - case 2) {:.2f} dB, "
                      "{} NR violations, {} cost violations",
                      d.settings.study.mu_grid.size(), min_gap, bad_nr, bad_cost)};
}

Outcome SpreadNarrowing() {
  Desk& d = GetDesk();
  const ssanc::CaseReport& r = GetReport();
  int bad = 0;
  double worst_ratio = 0.0;
  double worst_gap = 0.0;
  for (double mu : d.settings.study.mu_grid) {
    const auto& a2 = Aggregate(r, CaseKind::kMismatched, mu, "nr_db");
    const auto& a3 = Aggregate(r, CaseKind::kRobust, mu, "nr_db");
    const auto& a1 = Aggregate(r, CaseKind::kMatched, mu, "nr_db");
    const double w2 = a2.p_high - a2.p_low;
    const double w3 = a3.p_high - a3.p_low;
    const double gap = std::abs(a3.mean - a1.mean);
    if (!(w3 <= w2) || !(gap <= 3.0)) ++bad;
    worst_ratio = std::max(worst_ratio, w3 / w2);
    worst_gap = std::max(worst_gap, gap);
  }
  const double t = d.study_seconds;
  return {bad == 0 && t < 120.0,
          fmt::format("max width ratio case 3 / case 2 = {:.2f} (<= 1), max |mean "
                      "case 3 - case 1| = {:.2f} dB (<= 3), study {:.1f} s (< 120 s)",
                      worst_ratio, worst_gap, t)};
}

Outcome LoopConsistency() {
  std::mt19937_64 rng(1007);
  double offline_err = 0.0;
  double super_err = 0.0;
  bool zero_ok = true;
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 1 + trial % 3;
    const int lw = 4 + trial;
    const int lg = 3 + trial % 5;
    const int n = 700;
    const int ff = trial % 3;
    const int fb = 1 + trial % 4;
    std::vector<std::vector<double>> speech;
    std::vector<std::vector<double>> noise;
    std::vector<std::vector<double>> mix;
    for (int i = 0; i < k; ++i) {
      speech.push_back(oracle::RandomVector(rng, n));
      noise.push_back(oracle::RandomVector(rng, n));
      mix.push_back(speech.back());
      for (int t = 0; t < n; ++t) mix.back()[t] += noise.back()[t];
    }
    const std::vector<double> ps = oracle::RandomVector(rng, n);
    const std::vector<double> pv = oracle::RandomVector(rng, n);
    std::vector<double> p(n);
    for (int t = 0; t < n; ++t) p[t] = ps[t] + pv[t];
    const std::vector<double> g = oracle::RandomVector(rng, lg, 0.5);
    const StackedControlFilter w(
        ToVector(oracle::RandomVector(rng, (k + 1) * lw, 0.05)), k + 1);
    ssanc::LoopConfig cfg;
    cfg.ff_latency = ff;
    cfg.fb_latency = fb;
    const ssanc::ImpulseResponse gi(g, 8000);

    // Offline realization: with an exact internal model the loop is open.
    const ssanc::LoopOutput out =
        ssanc::SimulateLoop(w, gi, gi, ssanc::MultichannelSignal(mix, 8000), p, cfg);
    std::vector<double> y(n, 0.0);
    for (int b = 0; b <= k; ++b) {
      const std::vector<double>& src = b < k ? mix[b] : p;
      const std::vector<double> blk(w.block(b).begin(), w.block(b).end());
      const std::vector<double> part = oracle::Convolve(blk, src);
      const int lat = b < k ? ff : fb;
      for (int t = lat; t < n; ++t) y[t] += part[t - lat];
    }
    const std::vector<double> anti = oracle::Convolve(g, y);
    // Errors are relative to the leakage peak.
    const double scale = ToVector(p).cwiseAbs().maxCoeff();
    for (int t = lg + lw + fb; t < n; ++t) {
      offline_err =
          std::max(offline_err, std::abs(out.error[t] - p[t] - anti[t]) / scale);
    }

    // Superposition under an imperfect internal model.
    std::vector<double> gh = g;
    gh[0] *= 0.9;
    const ssanc::ScenarioSignals sig{ssanc::MultichannelSignal(mix, 8000), ps, pv,
                                     ssanc::MultichannelSignal(speech, 8000)};
    const ssanc::ComponentOutput comp = ssanc::SimulateComponents(
        w, gi, ssanc::ImpulseResponse(gh, 8000), sig, cfg);
    const ssanc::LoopOutput whole = ssanc::SimulateLoop(
        w, gi, ssanc::ImpulseResponse(gh, 8000), sig.outer_mics, p, cfg);
    if (comp.stable && whole.stable) {
      for (int t = 0; t < n; ++t) {
        super_err = std::max(super_err,
                             std::abs(whole.error[t] - comp.e_s[t] - comp.e_v[t]));
      }
    } else {
      super_err = std::numeric_limits<double>::infinity();
    }

    const ssanc::ComponentOutput zero =
        ssanc::SimulateComponents(StackedControlFilter::Zero(k + 1, lw), gi, gi, sig, cfg);
    zero_ok = zero_ok && ssanc::NoiseReductionDb(sig.leakage_noise, zero.e_v) == 0.0;
  }
  return {offline_err <= 1e-9 && super_err <= 1e-9 && zero_ok,
          fmt::format("offline max err {:.2e}, superposition max err {:.2e} "
                      "(<= 1e-9), NR(w = 0) exactly 0 dB: {}",
                      offline_err, super_err, zero_ok ? "yes" : "no")};
}

Outcome TradeOffTrend() {
  Desk& d = GetDesk();
  const ssanc::CaseReport& r = GetReport();
  int increases = 0;
  for (const auto& t : d.terms) {
    double prev = std::numeric_limits<double>::infinity();
    for (double mu : d.settings.study.mu_grid) {
      const ssanc::DesignProblem p = AtMu(mu);
      const double c =
          ssanc::EvaluateCost(ssanc::SolveTerms(p, t), p, d.ops[&t - d.terms.data()])
              .constraint_residual;
      if (c > prev * (1.0 + 1e-9) + 1e-14) ++increases;
      prev = c;
    }
  }
  const double lo = d.settings.study.mu_grid.front();
  const double hi = d.settings.study.mu_grid.back();
  const double sd_drop = Aggregate(r, CaseKind::kMatched, lo, "sd_db").mean -
                         Aggregate(r, CaseKind::kMatched, hi, "sd_db").mean;
  const double nr_lo = Aggregate(r, CaseKind::kMatched, lo, "nr_db").mean;
  const double nr_hi = Aggregate(r, CaseKind::kMatched, hi, "nr_db").mean;
  return {increases == 0 && sd_drop >= 3.0 && nr_hi < nr_lo,
          fmt::format("constraint increases {}, case 1 SD drop mu {} -> {}: {:.2f} dB "
                      "(>= 3), NR {:.2f} -> {:.2f} dB",
                      increases, lo, hi, sd_drop, nr_lo, nr_hi)};
}

Outcome MetricsOracles() {
  std::mt19937_64 rng(1009);
  double nr_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> a = oracle::RandomVector(rng, 2000, 3.0);
    const std::vector<double> b = oracle::RandomVector(rng, 2000, 0.2);
    double pa = 0.0;
    double pb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      pa += a[i] * a[i];
      pb += b[i] * b[i];
    }
    const double want = 10.0 * std::log10(pa / pb);
    nr_err = std::max({nr_err, std::abs(ssanc::NoiseReductionDb(a, b) - want),
                       std::abs(ssanc::SnrDb(a, b) - want)});
  }

  // Narrowband construction: e_s = 2 alpha x(n - delay) + tone, so only the
  // band holding the tone departs from 0 dB.
  const int fs = 16000;
  const double alpha = 2.0;
  const int delay = 12;
  const double sigma = 0.5;
  const double f0 = 1000.0;
  const double amp = 1.5;
  const std::vector<double> x = oracle::RandomVector(rng, 8 * fs, sigma);
  std::vector<double> e(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double ref = n >= static_cast<std::size_t>(delay) ? x[n - delay] : 0.0;
    e[n] = 2.0 * alpha * ref + amp * std::sin(2.0 * std::numbers::pi * f0 * n / fs);
  }
  const ssanc::BandAnalysis bands = ssanc::DefaultBandAnalysis();
  const double got = ssanc::SdIntelligDb(e, x, alpha, delay, bands, fs);
  const int seg = ssanc::DefaultWelchSegment(fs);
  const double df = static_cast<double>(fs) / seg;
  const double edge = std::pow(2.0, 1.0 / 6.0);
  int bins = 0;
  for (int k = 0; k <= seg / 2; ++k) {
    if (k * df >= f0 / edge && k * df < f0 * edge) ++bins;
  }
  const double ref_power = alpha * alpha * sigma * sigma * bins * df / (fs / 2.0);
  double used = 0.0;
  double weight = 0.0;
  for (std::size_t b = 0; b < bands.center_frequencies.size(); ++b) {
    if (bands.center_frequencies[b] * edge <= fs / 2.0) used += bands.importance_weights[b];
    if (bands.center_frequencies[b] == f0) weight = bands.importance_weights[b];
  }
  const double want =
      weight / used * 10.0 * std::log10(1.0 + (amp * amp / 2.0) / ref_power);
  const double sd_err = std::abs(got - want);

  ssanc::Settings s = ssanc::DeskScalePreset();
  s.Finalize();
  const ssanc::SyntheticScenario scene = ssanc::GenerateSyntheticScenario(s.scene);
  const double snr =
      ssanc::SnrDb(scene.signals.leakage_speech, scene.signals.leakage_noise);
  return {nr_err <= 1e-10 && sd_err <= 0.5 && std::abs(snr + 7.0) <= 0.01,
          fmt::format("NR/SNR max err {:.1e} (<= 1e-10), narrowband SD {:.3f} vs "
                      "analytic {:.3f} dB (<= 0.5), scene SNR {:.4f} dB (-7 +/- 0.01)",
                      nr_err, got, want, snr)};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome Determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "ssanc_acceptance_determinism";
  fs::remove_all(root);
  std::vector<fs::path> dirs;
  for (const int workers : {1, 1, 8, 8}) {
    const fs::path out = root / fmt::format("run{}_w{}", dirs.size(), workers);
    const std::string cmd = fmt::format(
        "\"{}\" --desk-scale --seed 7 --study.workers {} run-cases --out \"{}\" "
        ">/dev/null 2>&1",
        cli, workers, out.string());
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      return {false, fmt::format("run-cases failed: {}", cmd)};
    }
    dirs.push_back(out);
  }
  int compared = 0;
  int differ = 0;
  for (const auto& entry : fs::directory_iterator(dirs.front())) {
    if (entry.path().extension() != ".csv") continue;
    const std::string ref = Slurp(entry.path());
    for (std::size_t i = 1; i < dirs.size(); ++i) {
      ++compared;
      if (Slurp(dirs[i] / entry.path().filename()) != ref) ++differ;
    }
  }
  return {compared > 0 && differ == 0,
          fmt::format("4 runs (workers 1, 1, 8, 8), {} CSV comparisons, {} differ",
                      compared, differ)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : SSANC_CLI;
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"C1", "operator correctness", OperatorCorrectness},
      {"C2", "closed-form correctness", ClosedFormCorrectness},
      {"C3", "stationarity", Stationarity},
      {"C4", "robust optimality", RobustOptimality},
      {"C5", "matched dominance", MatchedDominance},
      {"C6", "spread narrowing", SpreadNarrowing},
      {"C7", "loop consistency", LoopConsistency},
      {"C8", "trade-off trend", TradeOffTrend},
      {"C9", "metrics oracles", MetricsOracles},
      {"C10", "determinism", [&] { return Determinism(cli); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %-4s %-24s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

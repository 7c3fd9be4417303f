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

// ssanc: scene generation, filter design, loop simulation and the case study.
//
// Exit codes: 0 success, 2 argument or configuration error, 3 numeric
// failure, 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssanc/case_study.h"
#include "ssanc/config.h"
#include "ssanc/errors.h"
#include "ssanc/filter_io.h"
#include "ssanc/metrics.h"
#include "ssanc/wav_io.h"

namespace {

using ssanc::Settings;

struct Common {
  std::string config_path;
  bool desk_scale = false;
  bool print_config = false;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  // Keys whose flag appeared on the command line (an empty value counts).
  std::set<std::string> given;
};

Settings ResolveSettings(const Common& c) {
  Settings s = c.desk_scale ? ssanc::DeskScalePreset() : ssanc::FullScaleDefaults();
  if (!c.config_path.empty()) s = ssanc::LoadSettingsFile(c.config_path, s);
  for (const auto& key : ssanc::SettingKeys()) {
    const auto it = c.flags.find(key.key);
    if (it != c.flags.end() && c.given.count(key.key)) {
      ssanc::ApplySetting(s, key.key, it->second);
    }
  }
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ssanc::ConfigError(fmt::format("--set '{}': expected key=value", kv));
    }
    ssanc::ApplySetting(s, kv.substr(0, eq), kv.substr(eq + 1));
  }
  s.Finalize();
  return s;
}

struct Inputs {
  ssanc::SyntheticScenario scenario;
  ssanc::PathEnsemble ensemble;
};

ssanc::PathEnsemble MakeEnsemble(const Settings& s,
                                 const ssanc::ImpulseResponse& nominal) {
  return ssanc::GeneratePathEnsemble(nominal, s.variation, s.ensemble_size);
}

// Loads the scenario (and its ensemble) from disk, or synthesises both from
// the settings when no directory is given.
Inputs LoadInputs(const Settings& s, const std::string& scenario_dir,
                  const std::string& ensemble_dir) {
  std::string ens_dir = ensemble_dir;
  ssanc::SyntheticScenario scenario = [&]() {
    if (scenario_dir.empty()) return ssanc::GenerateSyntheticScenario(s.scene);
    ssanc::LoadedScenario loaded = ssanc::LoadScenario(scenario_dir);
    if (ens_dir.empty()) ens_dir = loaded.ensemble_dir;
    return std::move(loaded.scenario);
  }();
  ssanc::PathEnsemble ensemble =
      ens_dir.empty() ? MakeEnsemble(s, scenario.secondary_path)
                      : ssanc::LoadPathEnsemble(ens_dir);
  return Inputs{std::move(scenario), std::move(ensemble)};
}

int FindPath(const ssanc::PathEnsemble& e, const std::string& label) {
  for (int j = 0; j < e.size(); ++j) {
    if (e.labels[j] == label) return j;
  }
  throw ssanc::ArgumentError(fmt::format("unknown path label '{}'", label));
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ssanc::IoError(fmt::format("{}: cannot write", path.string()));
  out << text;
  if (!out) throw ssanc::IoError(fmt::format("{}: write failed", path.string()));
}

void MakeDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ssanc::IoError(fmt::format("{}: cannot create directory: {}", dir,
                                     ec.message()));
  }
}

int CmdGenScenario(const Settings& s, const std::string& out) {
  const ssanc::SyntheticScenario scene = ssanc::GenerateSyntheticScenario(s.scene);
  const ssanc::PathEnsemble ensemble = MakeEnsemble(s, scene.secondary_path);
  MakeDir(out);
  ssanc::SavePathEnsemble(ensemble,
                          (std::filesystem::path(out) / "ensemble").string());
  ssanc::SaveScenario(scene, out, "ensemble");
  WriteText(std::filesystem::path(out) / "settings.yaml",
            ssanc::SettingsToYaml(s));
  fmt::print("scenario written to {}\n", out);
  return 0;
}

int CmdGenEnsemble(const Settings& s, const std::string& nominal_wav,
                   const std::string& out) {
  ssanc::ImpulseResponse nominal =
      ssanc::NominalSecondaryPath(s.study.design.path_length, s.scene.sample_rate);
  if (!nominal_wav.empty()) {
    const ssanc::MultichannelSignal w = ssanc::ReadMultichannelWav(nominal_wav);
    nominal = ssanc::ImpulseResponse(w.channels().front(), w.sample_rate());
  }
  ssanc::SavePathEnsemble(MakeEnsemble(s, nominal), out);
  fmt::print("ensemble of {} paths written to {}\n", s.ensemble_size, out);
  return 0;
}

int CmdDesign(const Settings& s, const Inputs& in, const std::string& path,
              double mu, const std::string& out) {
  ssanc::DesignContext ctx =
      ssanc::PrepareDesign(s.study, in.scenario, in.ensemble.path_length());
  ctx.problem.mu = mu;
  ssanc::FilterManifest m;
  ssanc::StackedControlFilter w = ssanc::StackedControlFilter::Zero(
      ctx.problem.num_blocks(), ctx.problem.filter_length);
  if (path == "robust") {
    std::vector<ssanc::BlockConvOperator> ops;
    for (const auto& g : in.ensemble.variants) ops.push_back(ctx.Operator(g));
    w = ssanc::DesignRobust(ctx.problem, ops, s.study.design.solver);
    m.design_paths = in.ensemble.labels;
  } else {
    const int j = FindPath(in.ensemble, path);
    w = ssanc::DesignSoft(ctx.problem, ctx.Operator(in.ensemble.variants[j]),
                          s.study.design.solver);
    m.design_paths = {path};
  }
  m.num_outer = ctx.problem.num_blocks() - 1;
  m.filter_length = ctx.problem.filter_length;
  m.sample_rate = in.scenario.signals.sample_rate();
  m.mu = mu;
  m.alpha = ctx.problem.alpha;
  m.delay = ctx.problem.delay;
  m.beta_ff = ctx.problem.regularizer.beta_ff;
  m.beta_fb = ctx.problem.regularizer.beta_fb;
  m.ff_latency = ctx.ff_latency;
  m.fb_latency = ctx.fb_latency;
  ssanc::SaveFilter(w, m, out);
  fmt::print("filter written to {}\n", out);
  return 0;
}

int CmdSimulate(const Settings& s, const Inputs& in,
                const std::string& filter_dir, const std::string& true_path,
                const std::string& estimate_path, const std::string& out) {
  const ssanc::StoredFilter stored = ssanc::LoadFilter(filter_dir);
  const ssanc::ImpulseResponse& g_true =
      in.ensemble.variants[FindPath(in.ensemble, true_path)];
  const ssanc::ImpulseResponse g_hat =
      estimate_path == "mean"
          ? in.ensemble.Mean()
          : in.ensemble.variants[FindPath(in.ensemble, estimate_path)];
  ssanc::CaseStudyConfig cfg = s.study;
  cfg.loop.ff_latency = stored.manifest.ff_latency;
  cfg.loop.fb_latency = stored.manifest.fb_latency;
  cfg.design.alpha = stored.manifest.alpha;
  cfg.design.delay = stored.manifest.delay;
  const ssanc::ScenarioSignals& sig = in.scenario.signals;
  const ssanc::ComponentOutput c =
      ssanc::SimulateComponents(stored.filter, g_true, g_hat, sig, cfg.loop);
  MakeDir(out);
  nlohmann::ordered_json j;
  j["true_path"] = true_path;
  j["estimate_path"] = estimate_path;
  j["stable"] = c.stable;
  if (c.stable) {
    const ssanc::RunMetrics m = ssanc::EvaluateRun(
        stored.filter, g_true, g_hat, in.scenario, cfg,
        ssanc::DefaultBandAnalysis());
    j["nr_db"] = m.nr_db;
    j["sd_db"] = m.sd_db;
    ssanc::WriteMultichannelWav(
        ssanc::MultichannelSignal({c.e, c.e_s, c.e_v, sig.Leakage(),
                                   sig.leakage_speech, sig.leakage_noise},
                                  sig.sample_rate()),
        (std::filesystem::path(out) / "signals.wav").string());
    j["signals"] = {"e", "e_s", "e_v", "p", "p_s", "p_v"};
  } else {
    j["nr_db"] = nullptr;
    j["sd_db"] = nullptr;
  }
  WriteText(std::filesystem::path(out) / "metrics.json", j.dump(2) + "\n");
  fmt::print("{}\n", j.dump());
  return c.stable ? 0 : 3;
}

int CmdRunCases(const Settings& s, const Inputs& in, const std::string& out) {
  const ssanc::CaseReport report =
      ssanc::RunCases(s.study, in.scenario, in.ensemble);
  ssanc::EmitReport(report, out);
  WriteText(std::filesystem::path(out) / "settings.yaml",
            ssanc::SettingsToYaml(s));
  fmt::print("{} runs, report written to {}{}\n", report.rows.size(), out,
             report.degenerate ? " (degenerate cells present)" : "");
  return 0;
}

int CmdPlotData(const std::string& aggregates, const std::string& signals,
                int segment, const std::string& out) {
  if (aggregates.empty() && signals.empty()) {
    throw ssanc::ArgumentError("plot-data: give --aggregates and/or --signals");
  }
  MakeDir(out);
  if (!aggregates.empty()) {
    ssanc::WritePlotData(ssanc::ReadAggregatesCsv(aggregates), out);
  }
  if (!signals.empty()) {
    const ssanc::MultichannelSignal sig = ssanc::ReadMultichannelWav(signals);
    std::vector<ssanc::WelchPsd> psd;
    for (int k = 0; k < sig.num_channels(); ++k) {
      psd.push_back(ssanc::EstimateWelchPsd(sig.channel(k), sig.sample_rate(),
                                            segment));
    }
    std::string text = "frequency_hz";
    for (int k = 0; k < sig.num_channels(); ++k) {
      text += fmt::format(",ch{}_psd_db", k);
    }
    text += "\n";
    for (std::size_t b = 0; b < psd.front().frequencies.size(); ++b) {
      text += fmt::format("{}", psd.front().frequencies[b]);
      for (const auto& p : psd) {
        text += p.psd[b] > 0.0 ? fmt::format(",{}", 10.0 * std::log10(p.psd[b]))
                               : std::string(",");
      }
      text += "\n";
    }
    WriteText(std::filesystem::path(out) / "psd.csv", text);
  }
  fmt::print("plot data written to {}\n", out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust soft-constrained SSANC filter design and evaluation"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "YAML settings file");
  app.add_flag("--desk-scale", common.desk_scale,
               "start from the small desk-scale preset");
  app.add_flag("--print-config", common.print_config,
               "print the resolved settings as YAML and exit");
  app.add_option("--set", common.sets, "key=value override (repeatable)");
  std::map<std::string, CLI::Option*> key_options;
  for (const auto& key : ssanc::SettingKeys()) {
    key_options[key.key] =
        app.add_option("--" + key.key, common.flags[key.key], key.help);
  }

  std::string out, scenario_dir, ensemble_dir, nominal_wav, path = "path_01",
      filter_dir, true_path = "path_01", estimate_path, aggregates, signals;
  double mu = 150.0;
  int segment = 0;

  auto* gen_scenario =
      app.add_subcommand("gen-scenario", "synthesise a scene and its ensemble");
  gen_scenario->add_option("--out", out, "output directory")->required();

  auto* gen_ensemble =
      app.add_subcommand("gen-ensemble", "generate a secondary-path ensemble");
  gen_ensemble->add_option("--nominal", nominal_wav, "nominal path WAV");
  gen_ensemble->add_option("--out", out, "output directory")->required();

  auto* design = app.add_subcommand("design", "design one control filter");
  design->add_option("--scenario", scenario_dir, "scenario directory");
  design->add_option("--ensemble", ensemble_dir, "ensemble directory");
  design->add_option("--path", path, "design path label or 'robust'");
  design->add_option("--mu", mu, "trade-off parameter");
  design->add_option("--out", out, "filter directory")->required();

  auto* simulate = app.add_subcommand("simulate", "run the closed loop");
  simulate->add_option("--scenario", scenario_dir, "scenario directory");
  simulate->add_option("--ensemble", ensemble_dir, "ensemble directory");
  simulate->add_option("--filter", filter_dir, "filter directory")->required();
  simulate->add_option("--true-path", true_path, "acoustic path label");
  simulate->add_option("--estimate-path", estimate_path,
                       "internal estimate label or 'mean' (default: true path)");
  simulate->add_option("--out", out, "output directory")->required();

  auto* run_cases = app.add_subcommand("run-cases", "the three-case study");
  run_cases->add_option("--scenario", scenario_dir, "scenario directory");
  run_cases->add_option("--ensemble", ensemble_dir, "ensemble directory");
  run_cases->add_option("--out", out, "report directory")->required();

  auto* plot_data = app.add_subcommand("plot-data", "per-figure series files");
  plot_data->add_option("--aggregates", aggregates, "aggregates.csv");
  plot_data->add_option("--signals", signals, "signals.wav from simulate");
  plot_data->add_option("--welch-segment", segment, "0: fs / 8");
  plot_data->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [key, opt] : key_options) {
    if (opt->count() > 0) common.given.insert(key);
  }
  if (app.get_subcommands().empty() && !common.print_config) {
    std::fprintf(stderr, "a subcommand is required\n%s",
                 app.help().c_str());
    return 2;
  }

  try {
    const Settings s = ResolveSettings(common);
    if (common.print_config) {
      fmt::print("{}", ssanc::SettingsToYaml(s));
      return 0;
    }
    if (*gen_scenario) return CmdGenScenario(s, out);
    if (*gen_ensemble) return CmdGenEnsemble(s, nominal_wav, out);
    if (*plot_data) return CmdPlotData(aggregates, signals, segment, out);
    const Inputs in = LoadInputs(s, scenario_dir, ensemble_dir);
    if (*design) return CmdDesign(s, in, path, mu, out);
    if (*simulate) {
      return CmdSimulate(s, in, filter_dir, true_path,
                         estimate_path.empty() ? true_path : estimate_path, out);
    }
    if (*run_cases) return CmdRunCases(s, in, out);
  } catch (const ssanc::ArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ssanc::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const ssanc::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 4;
  } catch (const ssanc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}

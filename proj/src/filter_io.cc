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

#include "ssanc/filter_io.h"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "json.hpp"
#include "ssanc/errors.h"
#include "ssanc/wav_io.h"

namespace ssanc {

void SaveFilter(const StackedControlFilter& filter,
                const FilterManifest& manifest, const std::string& dir) {
  if (filter.num_outer() != manifest.num_outer ||
      filter.filter_length() != manifest.filter_length) {
    throw ArgumentError("SaveFilter: manifest does not describe the filter");
  }
  if (manifest.sample_rate <= 0) {
    throw ArgumentError("SaveFilter: manifest sample_rate must be positive");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("{}: cannot create directory: {}", dir,
                              ec.message()));
  }
  const std::filesystem::path root(dir);
  std::vector<std::string> files;
  for (int k = 0; k < filter.num_blocks(); ++k) {
    const std::string name = fmt::format("w_{}.wav", k + 1);
    const auto b = filter.block(k);
    WriteMultichannelWav(
        MultichannelSignal({std::vector<double>(b.begin(), b.end())},
                           manifest.sample_rate),
        (root / name).string(), WavFormat::kFloat32);
    files.push_back(name);
  }
  nlohmann::ordered_json j;
  j["format"] = "ssanc-control-filter";
  j["version"] = 1;
  j["num_outer"] = manifest.num_outer;
  j["filter_length"] = manifest.filter_length;
  j["sample_rate"] = manifest.sample_rate;
  j["mu"] = manifest.mu;
  j["alpha"] = manifest.alpha;
  j["delay"] = manifest.delay;
  j["beta_ff"] = manifest.beta_ff;
  j["beta_fb"] = manifest.beta_fb;
  j["ff_latency"] = manifest.ff_latency;
  j["fb_latency"] = manifest.fb_latency;
  j["design_paths"] = manifest.design_paths;
  j["files"] = files;
  const std::string path = (root / "filter.json").string();
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("{}: cannot open for writing", path));
  out << j.dump(2) << "\n";
}

StoredFilter LoadFilter(const std::string& dir) {
  const std::filesystem::path root(dir);
  const std::string path = (root / "filter.json").string();
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("{}: cannot open manifest", path));
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    FilterManifest m;
    m.num_outer = j.at("num_outer").get<int>();
    m.filter_length = j.at("filter_length").get<int>();
    m.sample_rate = j.at("sample_rate").get<int>();
    m.mu = j.at("mu").get<double>();
    m.alpha = j.at("alpha").get<double>();
    m.delay = j.at("delay").get<int>();
    m.beta_ff = j.at("beta_ff").get<double>();
    m.beta_fb = j.at("beta_fb").get<double>();
    m.ff_latency = j.at("ff_latency").get<int>();
    m.fb_latency = j.at("fb_latency").get<int>();
    m.design_paths = j.at("design_paths").get<std::vector<std::string>>();
    const auto files = j.at("files").get<std::vector<std::string>>();
    if (static_cast<int>(files.size()) != m.num_outer + 1) {
      throw IoError(fmt::format("{}: 'files' lists {} filters, expected {}",
                                path, files.size(), m.num_outer + 1));
    }
    Vector stacked(files.size() * m.filter_length);
    for (std::size_t k = 0; k < files.size(); ++k) {
      const MultichannelSignal s =
          ReadMultichannelWav((root / files[k]).string());
      if (s.num_channels() != 1 ||
          static_cast<int>(s.num_samples()) != m.filter_length) {
        throw IoError(fmt::format(
            "{}: expected one channel of {} taps", files[k], m.filter_length));
      }
      for (int i = 0; i < m.filter_length; ++i) {
        stacked[k * m.filter_length + i] = s.channels()[0][i];
      }
    }
    return {StackedControlFilter(std::move(stacked), m.num_outer + 1), m};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(fmt::format("{}: malformed manifest: {}", path, e.what()));
  }
}

}  // namespace ssanc

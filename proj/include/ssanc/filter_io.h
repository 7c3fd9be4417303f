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

// Control filters on disk: filter.json plus w_1.wav ... w_{K+1}.wav holding
// the coefficients as float32 samples.

#ifndef SSANC_FILTER_IO_H_
#define SSANC_FILTER_IO_H_

#include <string>
#include <vector>

#include "ssanc/filter_design.h"

namespace ssanc {

struct FilterManifest {
  int num_outer = 0;
  int filter_length = 0;
  int sample_rate = 0;
  double mu = 0.0;
  double alpha = 0.0;
  int delay = 0;
  double beta_ff = 0.0;
  double beta_fb = 0.0;
  int ff_latency = 0;
  int fb_latency = 0;
  std::vector<std::string> design_paths;
};

struct StoredFilter {
  StackedControlFilter filter;
  FilterManifest manifest;
};

void SaveFilter(const StackedControlFilter& filter,
                const FilterManifest& manifest, const std::string& dir);
StoredFilter LoadFilter(const std::string& dir);

}  // namespace ssanc

#endif  // SSANC_FILTER_IO_H_

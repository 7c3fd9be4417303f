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

// Random small design problems built twice: once through the library and
// once as dense oracle matrices.

#ifndef SSANC_TESTS_INSTANCE_H_
#define SSANC_TESTS_INSTANCE_H_

#include <random>
#include <vector>

#include "oracle.h"
#include "ssanc/dsp_core.h"
#include "ssanc/filter_design.h"

namespace testing_support {

struct Instance {
  ssanc::DesignProblem problem;
  std::vector<double> g;
  int ff = 0;
  int fb = 1;
  std::vector<std::vector<double>> signals;
  oracle::Problem dense;

  ssanc::BlockConvOperator Operator() const;
};

struct InstanceLimits {
  int max_outer = 3;
  int max_filter_length = 12;
  int max_path_length = 8;
  double mu_log10_lo = -2.0;
  double mu_log10_hi = 3.0;
  bool frame_correlation = false;
};

Instance RandomInstance(std::mt19937_64& rng, const InstanceLimits& limits);

// Rebuilds the oracle's secondary matrix for another path of the same
// length and latencies.
oracle::Matrix OracleOperator(const Instance& inst,
                              const std::vector<double>& g);

}  // namespace testing_support

#endif  // SSANC_TESTS_INSTANCE_H_

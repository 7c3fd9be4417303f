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

// Minimal RIFF/WAVE reader and writer. Little-endian PCM16 and IEEE float32,
// any channel count. WAVE_FORMAT_EXTENSIBLE is accepted on read.

#ifndef SSANC_WAV_IO_H_
#define SSANC_WAV_IO_H_

#include <string>

#include "ssanc/dsp_core.h"

namespace ssanc {

enum class WavFormat { kPcm16, kFloat32 };

// Throws IoError naming the offending field (chunk id, format tag, block
// align, data size, ...). Never returns a partial signal.
MultichannelSignal ReadMultichannelWav(const std::string& path);

// PCM16 scales by 32768 and clamps to [-32768, 32767].
void WriteMultichannelWav(const MultichannelSignal& signal,
                          const std::string& path,
                          WavFormat format = WavFormat::kFloat32);

}  // namespace ssanc

#endif  // SSANC_WAV_IO_H_

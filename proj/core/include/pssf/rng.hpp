// Copyright 2026 The pssf Authors
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

#ifndef PSSF_RNG_HPP_
#define PSSF_RNG_HPP_

#include <Eigen/Core>
#include <cstdint>

namespace pssf {

enum class NoiseKind : std::uint64_t {
  kProcess = 1,
  kMeasurement = 2,
  kObstacle = 3,
  kInit = 4,
};

/// xoshiro256++ stream keyed by (seed, trial, agent, kind). Streams are
/// independent of platform and of each other; identical keys reproduce
/// identical sequences bit-for-bit.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t agent,
            NoiseKind kind);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal via Box-Muller (two uniforms per sample).
  double gaussian();
  Eigen::VectorXd gaussian_vector(int size);

 private:
  std::uint64_t state_[4];
};

}  // namespace pssf

#endif  // PSSF_RNG_HPP_

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

#include "pssf/rng.hpp"

#include <cmath>

namespace pssf {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t trial,
                     std::uint64_t agent, NoiseKind kind) {
  // FNV-1a over the key, then SplitMix64 to expand into the state.
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint64_t word :
       {seed, trial, agent, static_cast<std::uint64_t>(kind)}) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  }
  for (auto& s : state_) s = splitmix64(h);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  // Box-Muller; u1 floored away from zero so the log stays finite.
  const double u1 = std::max(uniform(), 0x1.0p-60);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::VectorXd RngStream::gaussian_vector(int size) {
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v(i) = gaussian();
  return v;
}

}  // namespace pssf

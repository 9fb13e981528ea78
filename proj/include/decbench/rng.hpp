// Copyright 2026 The decbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DECBENCH_RNG_HPP_
#define DECBENCH_RNG_HPP_

#include <cstdint>
#include <limits>
#include <vector>

namespace decbench {

// Counter-based generator. The n-th output of a stream is a pure function of
// (key, n), so sub-streams can be derived without touching the parent.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : key_(Mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  Rng Split(std::uint64_t stream) const {
    Rng child(0);
    child.key_ = Mix(key_ ^ Mix(stream + 0xbb67ae8584caa73bULL));
    return child;
  }

  result_type operator()() { return Mix(key_ + (++counter_) * kGolden); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Index drawn from unnormalized non-negative weights.
  std::size_t Categorical(const std::vector<double>& weights);

  std::vector<double> Dirichlet(std::size_t dim, double concentration);

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace decbench

#endif  // DECBENCH_RNG_HPP_

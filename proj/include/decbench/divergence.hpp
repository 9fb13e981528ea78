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

#ifndef DECBENCH_DIVERGENCE_HPP_
#define DECBENCH_DIVERGENCE_HPP_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decbench/model.hpp"

namespace decbench {

// Per-transition discrepancy l_h(Q; z_h) for the bilinear divergence.
using Discrepancy = std::function<double(int h, const QFunction& q,
                                         const Transition& z)>;

// Q_h(s, a) - r_h - max_a' Q_{h+1}(s', a').
double BellmanResidual(int h, const QFunction& q, const Transition& z);

// T_h[f](s, a) = r_h(s, a) + E[max_a' f(s', a')]; next_layer is indexed
// [s * A + a] and an empty vector stands for the all-zero layer H + 1.
std::vector<double> BellmanApply(const TabularMdp& mdp, int h,
                                 const std::vector<double>& next_layer);

// (T_1 Q_2, ..., T_H 0) as a Q-function.
QFunction BellmanBackup(const TabularMdp& mdp, const QFunction& q);

// sum_x (sqrt P(x) - sqrt Q(x))^2 over the union of supports.
double HellingerSq(const FiniteDistribution& p, const FiniteDistribution& q);

// Law of the full observation of an MDP under a policy, by enumeration.
std::vector<std::pair<std::vector<double>, double>> TrajectoryLaw(
    const TabularMdp& mdp, const PolicyTable& policy,
    double enumeration_cap = 1e6);

enum class DivergenceKind { kSquared, kHellinger, kBilinear, kSbe };

class Divergence {
 public:
  static Divergence Squared();
  static Divergence Hellinger(double enumeration_cap = 1e6);
  static Divergence Bilinear(Discrepancy discrepancy = nullptr);
  static Divergence Sbe();
  // "sq" | "hellinger" | "bilinear" | "sbe"
  static Divergence FromKey(std::string_view key);

  // D^pi(psi || M).
  double operator()(const Decision& pi, const SufficientStatistic& psi,
                    const Model& m) const;

  // Swaps the two arguments; rejected for bilinear and sbe.
  Divergence Flipped() const;

  DivergenceKind kind() const { return kind_; }
  bool flipped() const { return flipped_; }
  std::string key() const;
  bool symmetric() const;
  // Assumption-level constant; empty when it must be measured per instance.
  std::optional<double> lipschitz() const;
  std::optional<double> triangle_constant() const;
  double UpperBound(int horizon) const;
  bool accepts_q_functions() const;

 private:
  Divergence(DivergenceKind kind) : kind_(kind) {}
  double Evaluate(const Decision& pi, const SufficientStatistic& psi,
                  const Model& m) const;

  DivergenceKind kind_;
  bool flipped_ = false;
  double enumeration_cap_ = 1e6;
  Discrepancy discrepancy_;
};

// Free-function forms.
double SqDivergence(const Decision& pi, const SufficientStatistic& psi,
                    const Model& m);
double HellingerDivergence(const Decision& pi, const SufficientStatistic& psi,
                           const Model& m, double enumeration_cap = 1e6);
double BilinearDivergence(const Decision& pi, const QFunction& q,
                          const TabularMdp& m,
                          const Discrepancy& discrepancy = nullptr);
double SbeDivergence(const Decision& pi, const QFunction& q,
                     const TabularMdp& m);

// Per-layer E^{M,pi}[l_h(Q; z_h)].
std::vector<double> ExpectedDiscrepancy(const TabularMdp& m,
                                        const PolicyTable& pi,
                                        const QFunction& q,
                                        const Discrepancy& discrepancy);

// Largest (f^A(pi) - f^B(pi))^2 / D^pi(A || B) over the class; +inf when
// D vanishes on a pair with different means.
double MeasureLipschitzSq(const Divergence& d, const ModelClass& cls);

}  // namespace decbench

#endif  // DECBENCH_DIVERGENCE_HPP_

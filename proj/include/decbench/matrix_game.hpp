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

#ifndef DECBENCH_MATRIX_GAME_HPP_
#define DECBENCH_MATRIX_GAME_HPP_

#include <cstddef>
#include <vector>

namespace decbench {

// Row-major payoff A[i * cols + j]: row i is a model (maximizer), column j a
// decision (minimizer). The game value is min_p max_i (A p)_i.
struct PayoffMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  double operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }
};

enum class SaddleMethod {
  // Bland-rule simplex on the game LP; exact up to rounding.
  kSimplex,
  // Dual multiplicative weights over rows, pure best response in columns,
  // uniform averaging.
  kMultiplicativeWeights,
};

struct SolverOptions {
  double tol = 1e-8;
  std::size_t max_iters = 100000;
  SaddleMethod method = SaddleMethod::kSimplex;
};

struct SaddleResult {
  double value = 0.0;        // max_i (A p)_i at the returned p
  double lower_bound = 0.0;  // min_j (q^T A)_j at the returned q
  double gap = 0.0;          // value - lower_bound
  std::vector<double> p;     // over columns
  std::vector<double> q;     // over rows
  std::size_t worst_row = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

SaddleResult SolveMatrixGame(const PayoffMatrix& game,
                             const SolverOptions& options = {});

// max_i (A p)_i, with the argmax (lowest index on ties).
double MaxRow(const PayoffMatrix& game, const std::vector<double>& p,
              std::size_t* argmax = nullptr);
// min_j (q^T A)_j.
double MinColumn(const PayoffMatrix& game, const std::vector<double>& q);

// Minimum of max_i (A p)_i over the simplex grid with spacing `mesh`; refuses
// more than four columns.
double GridMinimum(const PayoffMatrix& game, double mesh);
// Certified bound on GridMinimum - value: max_i range_i(A) * (cols - 1) * mesh.
double GridSlack(const PayoffMatrix& game, double mesh);

}  // namespace decbench

#endif  // DECBENCH_MATRIX_GAME_HPP_

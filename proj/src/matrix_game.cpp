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

#include "decbench/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decbench/errors.hpp"

namespace decbench {
namespace {

constexpr double kPivotEps = 1e-12;

void Normalize(std::vector<double>& v) {
  double total = 0.0;
  for (auto& x : v) {
    x = std::max(x, 0.0);
    total += x;
  }
  for (auto& x : v) x /= total;
}

void Finish(const PayoffMatrix& game, const SolverOptions& options,
            SaddleResult& r) {
  r.value = MaxRow(game, r.p, &r.worst_row);
  r.lower_bound = MinColumn(game, r.q);
  r.gap = std::max(0.0, r.value - r.lower_bound);
  r.converged = r.gap <= options.tol;
}

// max 1^T x  s.t.  B x <= 1, x >= 0, with B = A - shift > 0.
SaddleResult SolveSimplex(const PayoffMatrix& game,
                          const SolverOptions& options) {
  const std::size_t m = game.rows, n = game.cols, width = n + m;
  const double shift = *std::min_element(game.a.begin(), game.a.end()) - 1.0;
  std::vector<double> t(m * width, 0.0), b(m, 1.0), z(width, 0.0);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i * width + j] = game(i, j) - shift;
    t[i * width + n + i] = 1.0;
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) z[j] = -1.0;
  double objective = 0.0;

  SaddleResult r;
  const std::size_t cap = std::max<std::size_t>(options.max_iters, 1);
  while (r.iterations < cap) {
    std::size_t enter = width;
    for (std::size_t j = 0; j < width; ++j) {
      if (z[j] < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double coef = t[i * width + enter];
      if (coef <= kPivotEps) continue;
      const double ratio = b[i] / coef;
      if (leave == m || ratio < best_ratio - kPivotEps ||
          (ratio <= best_ratio + kPivotEps && basis[i] < basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == m) break;  // unbounded cannot happen with B > 0
    const double pivot = t[leave * width + enter];
    for (std::size_t j = 0; j < width; ++j) t[leave * width + j] /= pivot;
    b[leave] /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = t[i * width + enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) {
        t[i * width + j] -= f * t[leave * width + j];
      }
      b[i] -= f * b[leave];
    }
    const double f = z[enter];
    for (std::size_t j = 0; j < width; ++j) z[j] -= f * t[leave * width + j];
    objective -= f * b[leave];
    basis[leave] = enter;
    ++r.iterations;
  }

  r.p.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) r.p[basis[i]] = b[i];
  }
  r.q.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) r.q[i] = z[n + i];
  if (!(objective > 0.0)) {
    r.p.assign(n, 1.0);
    r.q.assign(m, 1.0);
  }
  Normalize(r.p);
  Normalize(r.q);
  Finish(game, options, r);
  return r;
}

SaddleResult SolveMultiplicativeWeights(const PayoffMatrix& game,
                                        const SolverOptions& options) {
  const std::size_t m = game.rows, n = game.cols;
  const auto [lo, hi] = std::minmax_element(game.a.begin(), game.a.end());
  const double range = std::max(*hi - *lo, 1e-300);
  const double log_m = std::log(static_cast<double>(std::max<std::size_t>(m, 2)));

  std::vector<double> log_q(m, 0.0), q(m, 1.0 / m), q_sum(m, 0.0);
  std::vector<double> ap_sum(m, 0.0), col(n), p_count(n, 0.0);
  std::vector<double> best_q = q;
  double best_lower = -std::numeric_limits<double>::infinity();
  SaddleResult r;
  for (std::size_t t = 1; t <= std::max<std::size_t>(options.max_iters, 1);
       ++t) {
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) col[j] += q[i] * game(i, j);
    }
    const std::size_t br =
        std::min_element(col.begin(), col.end()) - col.begin();
    if (col[br] > best_lower) {
      best_lower = col[br];
      best_q = q;
    }
    for (std::size_t i = 0; i < m; ++i) q_sum[i] += q[i];
    const double avg_lower = MinColumn(game, q_sum);
    if (avg_lower > best_lower) {
      best_lower = avg_lower;
      best_q = q_sum;
      Normalize(best_q);
    }
    p_count[br] += 1.0;
    for (std::size_t i = 0; i < m; ++i) ap_sum[i] += game(i, br);
    const double upper =
        *std::max_element(ap_sum.begin(), ap_sum.end()) / static_cast<double>(t);
    r.iterations = t;
    if (upper - best_lower <= options.tol) break;
    const double eta = std::sqrt(log_m / static_cast<double>(t)) / range;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      log_q[i] += eta * game(i, br);
      top = std::max(top, log_q[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = std::exp(log_q[i] - top);
      total += q[i];
    }
    for (auto& x : q) x /= total;
  }
  r.p = p_count;
  Normalize(r.p);
  r.q = best_q;
  Finish(game, options, r);
  return r;
}

}  // namespace

double MaxRow(const PayoffMatrix& game, const std::vector<double>& p,
              std::size_t* argmax) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < game.rows; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < game.cols; ++j) {
      if (p[j] != 0.0) v += game(i, j) * p[j];
    }
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (argmax != nullptr) *argmax = best_i;
  return best;
}

double MinColumn(const PayoffMatrix& game, const std::vector<double>& q) {
  double total = 0.0;
  for (double x : q) total += x;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < game.cols; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < game.rows; ++i) {
      if (q[i] != 0.0) v += q[i] * game(i, j);
    }
    best = std::min(best, v / total);
  }
  return best;
}

SaddleResult SolveMatrixGame(const PayoffMatrix& game,
                             const SolverOptions& options) {
  if (game.rows == 0 || game.cols == 0 ||
      game.a.size() != game.rows * game.cols) {
    throw DomainError("SolveMatrixGame: malformed payoff matrix");
  }
  for (double x : game.a) {
    if (!std::isfinite(x)) throw DomainError("SolveMatrixGame: non-finite payoff");
  }
  if (options.method == SaddleMethod::kMultiplicativeWeights) {
    return SolveMultiplicativeWeights(game, options);
  }
  return SolveSimplex(game, options);
}

double GridMinimum(const PayoffMatrix& game, double mesh) {
  const std::size_t d = game.cols, m = game.rows;
  if (d > 4) throw DomainError("grid oracle refuses more than 4 decisions");
  if (!(mesh > 0.0 && mesh <= 1.0)) throw DomainError("grid mesh must be in (0, 1]");
  const long steps = std::lround(1.0 / mesh);
  const double inv = 1.0 / static_cast<double>(steps);
  if (d == 1) return MaxRow(game, {1.0});

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> last(m), second(m);
  for (std::size_t i = 0; i < m; ++i) {
    last[i] = game(i, d - 1);
    second[i] = game(i, d - 2);
  }
  // Columns d-2 and d-1 share whatever the outer loops leave.
  auto inner = [&](const std::vector<double>& base, long remaining) {
    for (long c = 0; c <= remaining; ++c) {
      const double wc = static_cast<double>(c) * inv;
      const double wl = static_cast<double>(remaining - c) * inv;
      double v = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        v = std::max(v, base[i] + wc * second[i] + wl * last[i]);
      }
      best = std::min(best, v);
    }
  };
  std::vector<double> base(m, 0.0), base2(m);
  if (d == 2) {
    inner(base, steps);
  } else if (d == 3) {
    for (long c0 = 0; c0 <= steps; ++c0) {
      for (std::size_t i = 0; i < m; ++i) {
        base[i] = static_cast<double>(c0) * inv * game(i, 0);
      }
      inner(base, steps - c0);
    }
  } else {
    for (long c0 = 0; c0 <= steps; ++c0) {
      for (std::size_t i = 0; i < m; ++i) {
        base[i] = static_cast<double>(c0) * inv * game(i, 0);
      }
      for (long c1 = 0; c0 + c1 <= steps; ++c1) {
        for (std::size_t i = 0; i < m; ++i) {
          base2[i] = base[i] + static_cast<double>(c1) * inv * game(i, 1);
        }
        inner(base2, steps - c0 - c1);
      }
    }
  }
  return best;
}

double GridSlack(const PayoffMatrix& game, double mesh) {
  double widest = 0.0;
  for (std::size_t i = 0; i < game.rows; ++i) {
    double lo = game(i, 0), hi = game(i, 0);
    for (std::size_t j = 1; j < game.cols; ++j) {
      lo = std::min(lo, game(i, j));
      hi = std::max(hi, game(i, j));
    }
    widest = std::max(widest, hi - lo);
  }
  return widest * static_cast<double>(game.cols - 1) * mesh;
}

}  // namespace decbench

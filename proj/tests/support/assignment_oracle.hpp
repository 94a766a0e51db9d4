#pragma once

// Independent references for uniform equal-size transport, which is an
// assignment problem: the optimal plan is a permutation matrix scaled by 1/n.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

using Costs = std::vector<std::vector<double>>;

/// Minimum-cost perfect matching by enumerating all permutations.
inline double brute_force_assignment(const Costs& c) {
  const std::size_t n = c.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c[i][p[i]];
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

/// Hungarian algorithm (shortest augmenting path with potentials), O(n^3).
/// Returns the optimal cost; match[i] receives the column of row i.
inline double hungarian(const Costs& c, std::vector<std::size_t>* match = nullptr) {
  const std::size_t n = c.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += c[i][row_to_col[i]];
  if (match) *match = row_to_col;
  return total;
}

}  // namespace oracle
